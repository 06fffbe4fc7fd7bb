//! Exact linear membership: a query against the span of finitely many vectors.

use crate::linalg::{axpy, recombine, Echelon, SparseVec};
use crate::Rational;

/// Spanning vectors and a query over a common monomial basis `K`.
#[derive(Clone, Debug)]
pub struct IdealMembershipProblem<K: Ord + Clone> {
    pub spanning: Vec<SparseVec<K>>,
    pub query: SparseVec<K>,
}

/// Either coefficients expressing the query, or what is left of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MembershipAnswer<K: Ord> {
    /// `query = sum_i c_i spanning[i]`.
    Certificate(SparseVec<usize>),
    /// Nonzero remainder after reduction; reproducible for fixed input order.
    Residual(SparseVec<K>),
}

impl<K: Ord> MembershipAnswer<K> {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipAnswer::Certificate(_))
    }
}

pub fn solve_membership<K: Ord + Clone>(p: &IdealMembershipProblem<K>) -> MembershipAnswer<K> {
    let mut e = Echelon::new();
    for v in &p.spanning {
        e.insert(v.clone());
    }
    let r = e.reduce(&p.query);
    if r.is_member() {
        MembershipAnswer::Certificate(r.certificate)
    } else {
        MembershipAnswer::Residual(r.residual)
    }
}

/// Recombine a certificate and compare with the query.
pub fn check_certificate<K: Ord + Clone>(p: &IdealMembershipProblem<K>, cert: &SparseVec<usize>) -> bool {
    recombine(&p.spanning, cert) == p.query
}

/// Check `query = residual + sum_i c_i spanning[i]` for a full reduction.
pub fn check_reduction<K: Ord + Clone>(
    spanning: &[SparseVec<K>],
    query: &SparseVec<K>,
    residual: &SparseVec<K>,
    cert: &SparseVec<usize>,
) -> bool {
    let mut total = recombine(spanning, cert);
    axpy(&mut total, &Rational::from_integer(1.into()), residual);
    total == *query
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn v(entries: &[(u32, i64)]) -> SparseVec<u32> {
        entries.iter().map(|&(k, c)| (k, rat(c))).collect()
    }

    #[test]
    fn identity_and_complement() {
        let spanning = vec![v(&[(0, 1), (1, 2)]), v(&[(1, 1), (2, -1)])];
        let p = IdealMembershipProblem { spanning: spanning.clone(), query: spanning[0].clone() };
        match solve_membership(&p) {
            MembershipAnswer::Certificate(c) => {
                assert_eq!(c, [(0usize, rat(1))].into_iter().collect());
                assert!(check_certificate(&p, &c));
            }
            other => panic!("expected certificate, got {other:?}"),
        }
        let outside = IdealMembershipProblem { spanning, query: v(&[(3, 5)]) };
        assert_eq!(solve_membership(&outside), MembershipAnswer::Residual(v(&[(3, 5)])));
    }
}
