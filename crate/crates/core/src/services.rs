//! Services, Boolean registers and service families.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::isa::{Focus, Method};

/// Reply values `t`, `f` and the divergent `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reply {
    True,
    False,
    Divergent,
}

impl Reply {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Reply::True
        } else {
            Reply::False
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Reply::True => Some(true),
            Reply::False => Some(false),
            Reply::Divergent => None,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            't' => Some(Reply::True),
            'f' => Some(Reply::False),
            'd' => Some(Reply::Divergent),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Reply::True => 't',
            Reply::False => 'f',
            Reply::Divergent => 'd',
        }
    }
}

impl From<bool> for Reply {
    fn from(b: bool) -> Self {
        Reply::from_bool(b)
    }
}

impl fmt::Display for Reply {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Key shared by every empty service.
pub const EMPTY_KEY: &str = "δ";

/// A service in a given state.
///
/// Implementations must satisfy the sink condition: when `reply(m)` is
/// divergent, `derive(m)` is an empty service, and an empty service replies
/// divergent to every method. `state_key` must be injective on the states a
/// service can reach, since interaction uses it to detect revisited
/// configurations.
pub trait Service: fmt::Debug + Send + Sync {
    fn reply(&self, method: &Method) -> Reply;
    fn derive(&self, method: &Method) -> Arc<dyn Service>;
    fn state_key(&self) -> String;
    fn is_empty(&self) -> bool;

    /// `state_key`, except that all empty services share [`EMPTY_KEY`].
    fn canonical_key(&self) -> String {
        if self.is_empty() {
            EMPTY_KEY.to_string()
        } else {
            self.state_key()
        }
    }
}

/// δ, the service that rejects every request.
#[derive(Debug, Clone, Copy, Default)]
pub struct EmptyService;

impl Service for EmptyService {
    fn reply(&self, _: &Method) -> Reply {
        Reply::Divergent
    }

    fn derive(&self, _: &Method) -> Arc<dyn Service> {
        Arc::new(EmptyService)
    }

    fn state_key(&self) -> String {
        EMPTY_KEY.to_string()
    }

    fn is_empty(&self) -> bool {
        true
    }
}

pub fn empty_service() -> Arc<dyn Service> {
    Arc::new(EmptyService)
}

/// Boolean register `B(x)` over methods `set:t`, `set:f` and `get`.
///
/// `get` replies the stored value, the two setters reply `t`. `B(d)` is the
/// empty service. Any other method is rejected and leads to `B(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BooleanRegister {
    value: Reply,
}

impl BooleanRegister {
    pub fn new(value: Reply) -> Self {
        BooleanRegister { value }
    }

    pub fn value(&self) -> Reply {
        self.value
    }

    pub fn shared(value: Reply) -> Arc<dyn Service> {
        Arc::new(Self::new(value))
    }

    /// The register after processing `method`.
    pub fn after(&self, method: &Method) -> BooleanRegister {
        let value = match (self.value, method) {
            (Reply::Divergent, _) => Reply::Divergent,
            (_, Method::SetT) => Reply::True,
            (_, Method::SetF) => Reply::False,
            (v, Method::Get) => v,
            (_, Method::Other(_)) => Reply::Divergent,
        };
        BooleanRegister { value }
    }
}

impl Service for BooleanRegister {
    fn reply(&self, method: &Method) -> Reply {
        match (self.value, method) {
            (Reply::Divergent, _) | (_, Method::Other(_)) => Reply::Divergent,
            (v, Method::Get) => v,
            (_, Method::SetT | Method::SetF) => Reply::True,
        }
    }

    fn derive(&self, method: &Method) -> Arc<dyn Service> {
        Arc::new(self.after(method))
    }

    fn state_key(&self) -> String {
        format!("B({})", self.value)
    }

    fn is_empty(&self) -> bool {
        self.value == Reply::Divergent
    }
}

/// A finite set of services, each named by a distinct focus.
#[derive(Debug, Clone, Default)]
pub struct ServiceFamily {
    services: BTreeMap<Focus, Arc<dyn Service>>,
}

impl ServiceFamily {
    /// `∅`
    pub fn empty() -> Self {
        Self::default()
    }

    /// `f.S`
    pub fn singleton(focus: Focus, service: Arc<dyn Service>) -> Self {
        ServiceFamily {
            services: BTreeMap::from([(focus, service)]),
        }
    }

    /// `u ⊕ v`: union, where a focus named on both sides holds δ.
    pub fn compose(&self, other: &ServiceFamily) -> ServiceFamily {
        let mut services = self.services.clone();
        for (focus, service) in &other.services {
            if services.contains_key(focus) {
                services.insert(focus.clone(), empty_service());
            } else {
                services.insert(focus.clone(), service.clone());
            }
        }
        ServiceFamily { services }
    }

    /// `∂_F(u)`: drop every service named in `foci`.
    pub fn encapsulate(&self, foci: &BTreeSet<Focus>) -> ServiceFamily {
        ServiceFamily {
            services: self
                .services
                .iter()
                .filter(|(f, _)| !foci.contains(*f))
                .map(|(f, s)| (f.clone(), s.clone()))
                .collect(),
        }
    }

    /// `f.S' ⊕ ∂_{f}(u)`: the family with the service at `focus` replaced.
    pub fn replace(&self, focus: &Focus, service: Arc<dyn Service>) -> ServiceFamily {
        let mut services = self.services.clone();
        services.insert(focus.clone(), service);
        ServiceFamily { services }
    }

    pub fn get(&self, focus: &Focus) -> Option<&Arc<dyn Service>> {
        self.services.get(focus)
    }

    pub fn contains(&self, focus: &Focus) -> bool {
        self.services.contains_key(focus)
    }

    pub fn foci(&self) -> impl Iterator<Item = &Focus> {
        self.services.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Focus, &Arc<dyn Service>)> {
        self.services.iter()
    }

    pub fn len(&self) -> usize {
        self.services.len()
    }

    pub fn is_empty(&self) -> bool {
        self.services.is_empty()
    }

    /// Canonical state keys in focus order.
    pub fn state_keys(&self) -> Vec<(Focus, String)> {
        self.services
            .iter()
            .map(|(f, s)| (f.clone(), s.canonical_key()))
            .collect()
    }
}

impl PartialEq for ServiceFamily {
    fn eq(&self, other: &Self) -> bool {
        self.state_keys() == other.state_keys()
    }
}

impl Eq for ServiceFamily {}

impl fmt::Display for ServiceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.services.is_empty() {
            return f.write_str("∅");
        }
        for (j, (focus, key)) in self.state_keys().into_iter().enumerate() {
            if j > 0 {
                f.write_str(" ⊕ ")?;
            }
            write!(f, "{focus}.{key}")?;
        }
        Ok(())
    }
}

impl FromIterator<(Focus, Arc<dyn Service>)> for ServiceFamily {
    /// Folds with `⊕`, so repeated foci collapse to δ.
    fn from_iter<T: IntoIterator<Item = (Focus, Arc<dyn Service>)>>(iter: T) -> Self {
        iter.into_iter().fold(ServiceFamily::empty(), |acc, (f, s)| {
            acc.compose(&ServiceFamily::singleton(f, s))
        })
    }
}

/// `⊕_{i=1..n} aux:i.B(t)`
pub fn aux_family(count: usize) -> ServiceFamily {
    (1..=count)
        .map(|i| (Focus::Aux(i), BooleanRegister::shared(Reply::True)))
        .collect()
}

/// `⊕_{i=1..k} in:i.B(b_i)`
pub fn input_family(values: &[Reply]) -> ServiceFamily {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| (Focus::Input(i + 1), BooleanRegister::shared(v)))
        .collect()
}

/// The two families of the partial-function computation setup: auxiliary
/// registers (for use) and input registers (for reply), in that order.
pub fn register_family(inputs: &[Reply], aux_count: usize) -> (ServiceFamily, ServiceFamily) {
    (aux_family(aux_count), input_family(inputs))
}

#[cfg(test)]
mod tests {
    use super::*;

    const REPLIES: [Reply; 3] = [Reply::True, Reply::False, Reply::Divergent];
    const METHODS: [Method; 3] = [Method::SetT, Method::SetF, Method::Get];

    fn b(v: Reply) -> BooleanRegister {
        BooleanRegister::new(v)
    }

    #[test]
    fn register_derivation_table() {
        use Reply::{Divergent, False, True};
        let cases = [
            (Method::SetT, True, True),
            (Method::SetT, False, True),
            (Method::SetT, Divergent, Divergent),
            (Method::SetF, True, False),
            (Method::SetF, False, False),
            (Method::SetF, Divergent, Divergent),
        ];
        for (method, from, to) in cases {
            assert_eq!(b(from).after(&method), b(to));
        }
        for x in REPLIES {
            assert_eq!(b(x).after(&Method::Get), b(x));
        }
    }

    #[test]
    fn register_replies() {
        assert_eq!(b(Reply::True).reply(&Method::Get), Reply::True);
        assert_eq!(b(Reply::False).reply(&Method::Get), Reply::False);
        for m in &METHODS {
            assert_eq!(b(Reply::Divergent).reply(m), Reply::Divergent);
        }
        for x in [Reply::True, Reply::False] {
            assert_eq!(b(x).reply(&Method::SetT), Reply::True);
            assert_eq!(b(x).reply(&Method::SetF), Reply::True);
            assert_eq!(b(x).reply(&Method::Other("inc".into())), Reply::Divergent);
            assert!(b(x).derive(&Method::Other("inc".into())).is_empty());
        }
    }

    #[test]
    fn sink_condition_and_closure() {
        // B(d) is the sink: it rejects everything, and every rejecting step lands there.
        let sink = b(Reply::Divergent);
        for m in &METHODS {
            assert_eq!(sink.reply(m), Reply::Divergent);
        }
        let states: BTreeSet<String> = REPLIES.iter().map(|&x| b(x).canonical_key()).collect();
        for x in REPLIES {
            for m in &METHODS {
                let next = b(x).derive(m);
                if b(x).reply(m) == Reply::Divergent {
                    assert_eq!(next.canonical_key(), sink.canonical_key());
                }
                assert!(states.contains(&next.canonical_key()));
            }
        }
        assert_eq!(sink.canonical_key(), EmptyService.canonical_key());
    }

    #[test]
    fn composition_and_encapsulation() {
        let f = Focus::Named("f".into());
        let u = ServiceFamily::singleton(f.clone(), BooleanRegister::shared(Reply::True));
        assert_eq!(u.compose(&ServiceFamily::empty()), u);
        let clash = u.compose(&ServiceFamily::singleton(
            f.clone(),
            BooleanRegister::shared(Reply::False),
        ));
        assert_eq!(clash, ServiceFamily::singleton(f.clone(), empty_service()));

        let one = ServiceFamily::singleton(Focus::Named("1".into()), BooleanRegister::shared(Reply::True));
        let two = ServiceFamily::singleton(Focus::Named("2".into()), BooleanRegister::shared(Reply::False));
        let both = one.compose(&two);
        assert_eq!(both.len(), 2);
        let drop_one = BTreeSet::from([Focus::Named("1".into())]);
        assert_eq!(both.encapsulate(&drop_one), two);
        assert_eq!(ServiceFamily::empty().encapsulate(&drop_one), ServiceFamily::empty());
        assert_eq!(both.encapsulate(&BTreeSet::new()), both);
    }

    #[test]
    fn register_families() {
        let (aux, inputs) = register_family(&[Reply::True, Reply::False], 0);
        assert!(aux.is_empty());
        assert_eq!(
            inputs.state_keys(),
            vec![
                (Focus::Input(1), "B(t)".to_string()),
                (Focus::Input(2), "B(f)".to_string())
            ]
        );
        let (aux, inputs) = register_family(&[], 2);
        assert!(inputs.is_empty());
        assert_eq!(aux.to_string(), "aux:1.B(t) ⊕ aux:2.B(t)");
        let (_, inputs) = register_family(&[Reply::Divergent], 0);
        assert_eq!(inputs, ServiceFamily::singleton(Focus::Input(1), empty_service()));
    }
}
