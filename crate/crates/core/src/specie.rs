use std::borrow::Borrow;
use std::fmt;
use std::sync::Arc;

/// Identifier of a molecular species.
///
/// Two identifiers are equal iff their tokens are equal. The empty token is
/// reserved for the void species, a virtual participant with a fixed count
/// of one that lets source and unimolecular reactions be treated as pair
/// reactions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpecieId(Arc<str>);

impl SpecieId {
    pub fn new(token: impl AsRef<str>) -> Self {
        SpecieId(Arc::from(token.as_ref()))
    }

    pub fn void() -> Self {
        SpecieId(Arc::from(""))
    }

    pub fn is_void(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for SpecieId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_void() {
            f.write_str("∅")
        } else {
            write!(f, "{:?}", &*self.0)
        }
    }
}

impl fmt::Display for SpecieId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_void() {
            f.write_str("∅")
        } else {
            f.write_str(&self.0)
        }
    }
}

impl From<&str> for SpecieId {
    fn from(s: &str) -> Self {
        SpecieId::new(s)
    }
}

impl From<String> for SpecieId {
    fn from(s: String) -> Self {
        SpecieId(Arc::from(s))
    }
}

impl Borrow<str> for SpecieId {
    fn borrow(&self) -> &str {
        &self.0
    }
}
