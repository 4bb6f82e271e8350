use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("permutation of order {order} does not factor through Z/{level}Z")]
    LevelMismatch { order: u64, level: u64 },
    #[error("parameter must be at least 1")]
    ZeroParameter,
}

/// A generator of a residually finite action on the components
/// `0..perm.len()`, factoring through `Z/level Z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicAction {
    pub level: u64,
    pub perm: Vec<usize>,
}

impl CyclicAction {
    pub fn new(level: u64, perm: Vec<usize>) -> Result<Self, ActionError> {
        if level == 0 {
            return Err(ActionError::ZeroLevel);
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(ActionError::NotPermutation(perm.len()));
            }
        }
        let a = CyclicAction { level, perm };
        let order = a.order();
        if !level.is_multiple_of(order) {
            return Err(ActionError::LevelMismatch { order, level });
        }
        Ok(a)
    }

    pub fn trivial(components: usize) -> Self {
        CyclicAction {
            level: 1,
            perm: (0..components).collect(),
        }
    }

    /// Order of the permutation: the lcm of its cycle lengths.
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.perm.len()];
        let mut order = 1u64;
        for start in 0..self.perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            order = order.lcm(&len);
        }
        order
    }

    /// `perm^n`.
    pub fn power(&self, n: u64) -> Vec<usize> {
        let steps = n % self.order();
        (0..self.perm.len())
            .map(|start| {
                let mut i = start;
                for _ in 0..steps {
                    i = self.perm[i];
                }
                i
            })
            .collect()
    }
}

/// Precomposition with `sigma_n`: the generator acts as its `n`-th power.
pub fn twist_action(n: u64, a: &CyclicAction) -> Result<CyclicAction, ActionError> {
    if n == 0 {
        return Err(ActionError::ZeroParameter);
    }
    Ok(CyclicAction {
        level: a.level,
        perm: a.power(n),
    })
}

/// `n` copies of the components, indexed `x * n + i`; the generator sends
/// `(x, i)` to `(x, i + 1)` and wraps `(x, n - 1)` to `(perm(x), 0)`. The
/// result factors through `Z/(level n)Z`.
pub fn versch_product(n: u64, a: &CyclicAction) -> Result<CyclicAction, ActionError> {
    if n == 0 {
        return Err(ActionError::ZeroParameter);
    }
    let n = n as usize;
    let perm = (0..a.perm.len() * n)
        .map(|c| {
            let (x, i) = (c / n, c % n);
            if i + 1 < n {
                x * n + i + 1
            } else {
                a.perm[x] * n
            }
        })
        .collect();
    Ok(CyclicAction {
        level: a.level * n as u64,
        perm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cycle(k: usize) -> Vec<usize> {
        (0..k).map(|i| (i + 1) % k).collect()
    }

    #[test]
    fn validation() {
        assert!(CyclicAction::new(2, vec![1, 0]).is_ok());
        assert_eq!(CyclicAction::new(3, vec![1, 0]), Err(ActionError::LevelMismatch { order: 2, level: 3 }));
        assert_eq!(CyclicAction::new(2, vec![0, 0]), Err(ActionError::NotPermutation(2)));
        assert_eq!(CyclicAction::new(0, vec![]), Err(ActionError::ZeroLevel));
    }

    #[test]
    fn twist_examples() {
        let swap = CyclicAction::new(2, vec![1, 0]).unwrap();
        assert_eq!(twist_action(1, &swap).unwrap(), swap);
        assert_eq!(twist_action(2, &swap).unwrap().order(), 1);
        let six = CyclicAction::new(6, cycle(6)).unwrap();
        assert_eq!(twist_action(2, &six).unwrap().order(), 3);
    }

    #[test]
    fn versch_examples() {
        let swap = CyclicAction::new(2, vec![1, 0]).unwrap();
        assert_eq!(versch_product(1, &swap).unwrap(), swap);
        let v = versch_product(2, &swap).unwrap();
        assert_eq!(v.order(), 4);
        assert_eq!(v.level, 4);
        // g^2 acts as the swap on both copies
        assert_eq!(v.power(2), vec![2, 3, 0, 1]);
        let v = versch_product(3, &CyclicAction::trivial(1)).unwrap();
        assert_eq!(v.perm, vec![1, 2, 0]);
        assert_eq!(v.order(), 3);
    }

    fn arb_action() -> impl Strategy<Value = CyclicAction> {
        (1usize..=6)
            .prop_flat_map(|k| Just((0..k).collect::<Vec<usize>>()).prop_shuffle())
            .prop_flat_map(|perm| {
                let order = CyclicAction { level: 1, perm: perm.clone() }.order();
                (1u64..=3).prop_map(move |m| CyclicAction::new(order * m, perm.clone()).unwrap())
            })
    }

    proptest! {
        #[test]
        fn twist_composes(a in arb_action(), n in 1u64..=6, m in 1u64..=6) {
            let lhs = twist_action(n, &twist_action(m, &a).unwrap()).unwrap();
            prop_assert_eq!(lhs, twist_action(n * m, &a).unwrap());
        }

        #[test]
        fn versch_factors_through(a in arb_action(), n in 1u64..=4) {
            let v = versch_product(n, &a).unwrap();
            prop_assert_eq!(v.level % v.order(), 0);
            prop_assert!(CyclicAction::new(v.level, v.perm.clone()).is_ok());
            // the n-th power of the generator acts as perm on every copy
            let p = v.power(n);
            for (x, &px) in a.perm.iter().enumerate() {
                for i in 0..n as usize {
                    prop_assert_eq!(p[x * n as usize + i], px * n as usize + i);
                }
            }
        }
    }
}
