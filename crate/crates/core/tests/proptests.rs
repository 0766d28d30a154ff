use hfsplice_core::f2::{sparse_rank, BitMatrix, BitVec};
use hfsplice_core::word_calculus::{concat, is_alternating, phi, phi_inverse, psi};
use proptest::prelude::*;

fn alternating() -> impl Strategy<Value = Vec<u8>> {
    (1u8..=3, prop::collection::vec(any::<bool>(), 0..24)).prop_map(|(start, steps)| {
        let mut s = vec![start];
        for up in steps {
            let d = *s.last().unwrap();
            s.push(match (d, up) {
                (1, _) => 2,
                (3, _) => 2,
                (_, true) => 3,
                _ => 1,
            });
        }
        s
    })
}

fn matrix(max: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
            let mut m = BitMatrix::zeros(r, c);
            for (k, b) in bits.into_iter().enumerate() {
                m.set(k / c, k % c, b);
            }
            m
        })
    })
}

proptest! {
    #[test]
    fn psi_runs_concatenate_back(s in alternating()) {
        prop_assert!(is_alternating(&s));
        let runs = psi(&s).unwrap();
        let back: Vec<u8> = runs.iter().flat_map(|j| j.digits().iter().copied()).collect();
        prop_assert_eq!(&back, &s);
        for w in runs.windows(2) {
            prop_assert!(w[0].last() < w[1].first());
        }
        let labels: Vec<_> = runs.iter().map(|&j| phi(j)).collect();
        prop_assert_eq!(runs, labels.iter().map(|&i| phi_inverse(i)).collect::<Vec<_>>());
        prop_assert!(is_alternating(&concat(&labels)));
    }

    #[test]
    fn rank_is_transpose_invariant(m in matrix(12)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= m.rows().min(m.cols()));
    }

    #[test]
    fn sparse_rank_agrees_with_dense(m in matrix(12)) {
        let rows = (0..m.rows()).map(|r| m.row(r).ones().collect::<Vec<_>>());
        prop_assert_eq!(sparse_rank(rows), m.rank());
    }

    #[test]
    fn apply_is_linear(m in matrix(10), a in prop::collection::vec(any::<bool>(), 10), b in prop::collection::vec(any::<bool>(), 10)) {
        let n = m.cols();
        let u = BitVec::from_indices(n, (0..n).filter(|&i| a[i]));
        let v = BitVec::from_indices(n, (0..n).filter(|&i| b[i]));
        let mut w = u.clone();
        w.xor_assign(&v);
        let mut sum = m.apply(&u);
        sum.xor_assign(&m.apply(&v));
        prop_assert_eq!(m.apply(&w), sum);
    }

    #[test]
    fn inverse_inverts(m in matrix(8)) {
        if m.rows() == m.cols() {
            match m.inverse() {
                Some(inv) => prop_assert_eq!(m.mul(&inv), BitMatrix::identity(m.rows())),
                None => prop_assert!(m.rank() < m.rows()),
            }
        }
    }
}
