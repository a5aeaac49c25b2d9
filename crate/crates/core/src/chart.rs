use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// A single coordinate chart on a `(2n + q)`-dimensional manifold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chart {
    n: usize,
    q: usize,
    names: Vec<String>,
}

impl Chart {
    pub fn new(n: usize, q: usize, names: Vec<String>) -> Result<Self> {
        if n == 0 || q == 0 {
            return Err(Error::InvalidChart(format!(
                "n and q must be positive (n = {n}, q = {q})"
            )));
        }
        if names.len() != 2 * n + q {
            return Err(Error::InvalidChart(format!(
                "{} coordinate names for dimension {}",
                names.len(),
                2 * n + q
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|name| !seen.insert(name.as_str())) {
            return Err(Error::InvalidChart(format!(
                "duplicate coordinate name {dup:?}"
            )));
        }
        Ok(Self { n, q, names })
    }

    /// Chart with labels `q1, p1, …, qn, pn, z1, …, zq`.
    pub fn canonical(n: usize, q: usize) -> Result<Self> {
        let mut names = Vec::with_capacity(2 * n + q);
        for j in 1..=n {
            names.push(format!("q{j}"));
            names.push(format!("p{j}"));
        }
        names.extend((1..=q).map(|i| format!("z{i}")));
        Self::new(n, q, names)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        2 * self.n + self.q
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_labels() {
        let c = Chart::canonical(2, 1).unwrap();
        assert_eq!(c.names(), ["q1", "p1", "q2", "p2", "z1"]);
        assert_eq!(c.dim(), 5);
        assert_eq!(c.index_of("p2"), Some(3));
    }

    #[test]
    fn rejects_bad_charts() {
        assert!(Chart::canonical(0, 1).is_err());
        assert!(Chart::canonical(1, 0).is_err());
        assert!(Chart::new(1, 1, vec!["a".into(), "b".into()]).is_err());
        assert!(Chart::new(1, 1, vec!["a".into(), "b".into(), "a".into()]).is_err());
    }
}
