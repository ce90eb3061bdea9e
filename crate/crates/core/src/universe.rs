//! Finite pools of candidate imports.
//!
//! The import space of a quantified type is infinite. Search procedures
//! (label enumeration for P, strategy enumeration, term enumeration) draw
//! imports from an [`ImportUniverse`] instead, so completeness is always
//! relative to the universe in use.

use crate::types::{Name, TypeExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImportUniverse {
    /// Additional candidates offered in every scope.
    pub extra: Vec<TypeExpr>,
    /// Also offer `A -> B` for every pair of in-scope variables.
    pub arrows: bool,
    /// Cap on the number of imports in a single label.
    pub max_imports: usize,
}

impl Default for ImportUniverse {
    fn default() -> Self {
        ImportUniverse { extra: Vec::new(), arrows: false, max_imports: 4 }
    }
}

impl ImportUniverse {
    pub fn new(extra: Vec<TypeExpr>) -> Self {
        ImportUniverse { extra, ..Default::default() }
    }

    pub fn with_arrows(mut self, arrows: bool) -> Self {
        self.arrows = arrows;
        self
    }

    pub fn with_max_imports(mut self, max_imports: usize) -> Self {
        self.max_imports = max_imports;
        self
    }

    /// Candidates given the variables in scope, in introduction order.
    pub fn candidates(&self, scope: &[Name]) -> Vec<TypeExpr> {
        let mut out: Vec<TypeExpr> = scope.iter().map(|n| TypeExpr::Var(n.clone())).collect();
        if self.arrows {
            for a in scope {
                for b in scope {
                    out.push(TypeExpr::arrow(TypeExpr::Var(a.clone()), TypeExpr::Var(b.clone())));
                }
            }
        }
        for t in &self.extra {
            if !out.contains(t) {
                out.push(t.clone());
            }
        }
        out
    }

    /// Parse a `;`-separated list of types.
    pub fn parse_list(text: &str) -> crate::Result<Vec<TypeExpr>> {
        text.split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(TypeExpr::parse)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn candidates_follow_scope_order() {
        let u = ImportUniverse::new(vec![TypeExpr::parse("forall Y. Y").unwrap()]).with_arrows(true);
        let scope: Vec<Name> = vec![Arc::from("A"), Arc::from("B")];
        let c: Vec<String> = u.candidates(&scope).iter().map(|t| t.to_string()).collect();
        assert_eq!(c, ["A", "B", "A -> A", "A -> B", "B -> A", "B -> B", "forall Y. Y"]);
        assert_eq!(ImportUniverse::parse_list(" X ; Y -> Y;").unwrap().len(), 2);
    }
}
