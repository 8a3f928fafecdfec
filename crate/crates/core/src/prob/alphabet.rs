use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// A labelled finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    name: String,
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, symbols: Vec<String>) -> Result<Self> {
        let name = name.into();
        if symbols.is_empty() {
            return Err(Error::Model(format!("alphabet `{name}` is empty")));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::Model(format!(
                    "alphabet `{name}` repeats symbol `{s}`"
                )));
            }
        }
        Ok(Alphabet { name, symbols })
    }

    /// Alphabet with symbols `"0"`, `"1"`, ..., `size - 1`.
    pub fn indexed(name: impl Into<String>, size: usize) -> Result<Self> {
        Self::new(name, (0..size).map(|i| i.to_string()).collect())
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self::indexed(name, 2).expect("two distinct symbols")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    /// Same symbols under another label.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Alphabet {
            name: name.into(),
            symbols: self.symbols.clone(),
        }
    }

    /// Same size and symbols, ignoring the label.
    pub fn same_symbols(&self, other: &Alphabet) -> bool {
        self.symbols == other.symbols
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_empty_and_repeated() {
        assert!(Alphabet::new("A", vec![]).is_err());
        assert!(Alphabet::new("A", vec!["x".into(), "x".into()]).is_err());
        let a = Alphabet::new("A", vec!["x".into(), "y".into()]).unwrap();
        assert_eq!(a.size(), 2);
        assert_eq!(a.index_of("y"), Some(1));
    }
}
