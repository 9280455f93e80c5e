mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use sli::logic::Variable;
use sli::tensor::{BitTensor, Shape};

type Tuples = BTreeSet<Vec<u32>>;

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn var(i: usize) -> Variable {
    Variable::new(NAMES[i], "T")
}

fn shape(extents: &[usize]) -> Shape {
    Shape::from_pairs(extents.iter().enumerate().map(|(i, &e)| (var(i), e))).unwrap()
}

/// A tensor over the axes `a, b, ..` with the given extents, and the same set
/// as explicit tuples.
fn tensor_and_set(extents: Vec<usize>, seed: Vec<bool>) -> (BitTensor, Tuples) {
    let all = common::tuples(&extents);
    let set: Tuples = all
        .into_iter()
        .enumerate()
        .filter(|(i, _)| seed[i % seed.len()] ^ (i % 7 == 3))
        .map(|(_, t)| t)
        .collect();
    let sh = shape(&extents);
    let t = BitTensor::from_fn(sh.clone(), |i| set.contains(&sh.decode(i))).unwrap();
    (t, set)
}

fn ones(t: &BitTensor) -> Tuples {
    t.iter_ones().collect()
}

fn arb_extents() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..=6, 0..=3)
}

fn arb_seed() -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), 1..80)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pointwise_kernels_match_set_operations(ext in arb_extents(), s1 in arb_seed(), s2 in arb_seed()) {
        let (a, sa) = tensor_and_set(ext.clone(), s1);
        let (b, sb) = tensor_and_set(ext.clone(), s2);
        prop_assert_eq!(ones(&a), sa.clone());
        prop_assert_eq!(ones(&a.and(&b).unwrap()), sa.intersection(&sb).cloned().collect::<Tuples>());
        prop_assert_eq!(ones(&a.or(&b).unwrap()), sa.union(&sb).cloned().collect::<Tuples>());
        let all: Tuples = common::tuples(&ext).into_iter().collect();
        prop_assert_eq!(ones(&a.not()), all.difference(&sa).cloned().collect::<Tuples>());
        prop_assert_eq!(a.popcount(), sa.len() as u64);
        for t in [a.not(), a.and(&b).unwrap(), a.or(&b).unwrap()] {
            prop_assert!(t.bits().padding_is_clear());
        }
    }

    #[test]
    fn de_morgan(ext in arb_extents(), s1 in arb_seed(), s2 in arb_seed()) {
        let (a, _) = tensor_and_set(ext.clone(), s1);
        let (b, _) = tensor_and_set(ext, s2);
        prop_assert_eq!(a.and(&b).unwrap().not(), a.not().or(&b.not()).unwrap());
        prop_assert_eq!(a.or(&b).unwrap().not(), a.not().and(&b.not()).unwrap());
        prop_assert_eq!(a.not().not(), a);
    }

    #[test]
    fn insert_axis_is_a_product(ext in prop::collection::vec(0usize..=5, 0..=2), s in arb_seed(), pos in 0usize..=2, extent in 0usize..=4) {
        let (a, sa) = tensor_and_set(ext.clone(), s);
        let pos = pos.min(ext.len());
        let t = a.insert_axis(pos, var(3), extent).unwrap();
        let expect: Tuples = sa
            .iter()
            .flat_map(|tu| (0..extent as u32).map(move |e| {
                let mut v = tu.clone();
                v.insert(pos, e);
                v
            }))
            .collect();
        prop_assert_eq!(ones(&t), expect);
        prop_assert!(t.bits().padding_is_clear());
    }

    #[test]
    fn permute_reindexes(ext in prop::collection::vec(0usize..=5, 0..=3), s in arb_seed(), rot in 0usize..3, swap in any::<bool>()) {
        let (a, sa) = tensor_and_set(ext.clone(), s);
        let r = ext.len();
        let mut perm: Vec<usize> = (0..r).collect();
        if r > 0 {
            perm.rotate_left(rot % r);
        }
        if swap && r >= 2 {
            perm.swap(0, 1);
        }
        let t = a.permute(&perm).unwrap();
        let expect: Tuples = sa.iter().map(|tu| perm.iter().map(|&k| tu[k]).collect()).collect();
        prop_assert_eq!(ones(&t), expect);
        let back = t.permute_to(&a.shape().vars()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn reductions_match_quantifier_definitions(ext in prop::collection::vec(0usize..=5, 1..=3), s in arb_seed(), k in 0usize..3) {
        let (a, sa) = tensor_and_set(ext.clone(), s);
        let k = k % ext.len();
        let mut rest = ext.clone();
        rest.remove(k);
        let with = |tu: &Vec<u32>, e: u32| {
            let mut v = tu.clone();
            v.insert(k, e);
            v
        };
        let any: Tuples = common::tuples(&rest)
            .into_iter()
            .filter(|tu| (0..ext[k] as u32).any(|e| sa.contains(&with(tu, e))))
            .collect();
        let all: Tuples = common::tuples(&rest)
            .into_iter()
            .filter(|tu| (0..ext[k] as u32).all(|e| sa.contains(&with(tu, e))))
            .collect();
        let ra = a.reduce_any(&var(k)).unwrap();
        let rl = a.reduce_all(&var(k)).unwrap();
        prop_assert_eq!(ones(&ra), any);
        prop_assert_eq!(ones(&rl), all);
        prop_assert!(ra.bits().padding_is_clear() && rl.bits().padding_is_clear());
        // Quantifier duality on tensors.
        prop_assert_eq!(rl, a.not().reduce_any(&var(k)).unwrap().not());
    }
}

#[test]
fn scalar_tensors() {
    let t = BitTensor::scalar(true);
    assert_eq!(t.as_scalar(), Some(true));
    assert_eq!(t.not().as_scalar(), Some(false));
    assert_eq!(ones(&t), [vec![]].into_iter().collect());
}
