mod common;

use std::collections::BTreeSet;

use common::{random_type, rng, test_signature, TermGen};
use hodp::matching::match_pattern;
use hodp::order::{horpo_gt, Precedence};
use hodp::pcc::pcc_closure;
use hodp::signature::{positions_of_polarity, Polarity};
use hodp::{Position, Substitution, Term, Type};
use proptest::prelude::*;

fn leaves(ty: &Type) -> BTreeSet<Position> {
    fn go(ty: &Type, digits: &mut Vec<u8>, out: &mut BTreeSet<Position>) {
        match ty {
            Type::Base(_) => {
                out.insert(Position::from_digits(digits.iter().copied()));
            }
            Type::Arrow(d, c) => {
                digits.push(1);
                go(d, digits, out);
                digits.pop();
                digits.push(2);
                go(c, digits, out);
                digits.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(ty, &mut Vec::new(), &mut out);
    out
}

fn n() -> Type {
    Type::base("N")
}

fn l() -> Type {
    Type::base("L")
}

/// Random substitution for the free variables of `t`.
fn random_subst(seed: u64, t: &Term, sig: &hodp::signature::Signature) -> Substitution {
    let mut g = TermGen::new(seed, sig);
    t.free_vars()
        .into_iter()
        .map(|v| {
            let u = g.term(&v.ty, 4);
            (v, u)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn polarity_partitions_leaves(seed in any::<u64>()) {
        let ty = random_type(&mut rng(seed), 6, &["A", "B", "C"]);
        let pos = positions_of_polarity(&ty, Polarity::Positive);
        let neg = positions_of_polarity(&ty, Polarity::Negative);
        prop_assert!(pos.is_disjoint(&neg));
        let all: BTreeSet<Position> = pos.union(&neg).cloned().collect();
        prop_assert_eq!(all, leaves(&ty));
        prop_assert!(pos.contains(&Position::from_digits(
            std::iter::repeat_n(2, ty.arity())
        )));
    }

    #[test]
    fn substitution_preserves_types(seed in any::<u64>(), size in 1usize..16) {
        let sig = test_signature();
        let mut g = TermGen::new(seed, &sig);
        let ty = if seed % 2 == 0 { n() } else { l() };
        let t = g.term(&ty, size);
        prop_assert_eq!(t.type_of().unwrap(), ty.clone());
        let s = random_subst(seed ^ 0x5eed, &t, &sig);
        prop_assert!(s.is_type_preserving());
        let u = s.apply(&t);
        prop_assert_eq!(u.type_of().unwrap(), ty);
        // a domain variable survives only through some replacement term
        for v in s.domain() {
            prop_assert!(!u.has_free(v) || s.iter().any(|(_, r)| r.has_free(v)));
        }
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names(seed in any::<u64>()) {
        let sig = test_signature();
        let mut g = TermGen::new(seed, &sig);
        let t = g.term(&Type::arrow(n(), n()), 10);
        if let Term::Lam(x, body) = &t {
            let fresh = hodp::Var::new("fresh", x.ty.clone());
            let s: Substitution = [(x.clone(), Term::Var(fresh.clone()))].into_iter().collect();
            let renamed = Term::lam(fresh, s.apply(body));
            prop_assert!(renamed.alpha_eq(&t));
            prop_assert_eq!(renamed.canonical(), t.canonical());
        }
    }

    #[test]
    fn matching_is_sound_and_complete(seed in any::<u64>(), size in 2usize..10) {
        let sig = test_signature();
        let mut g = TermGen::new(seed, &sig);
        g.redexes = false;
        let pattern = g.term(&l(), size);
        let sigma = random_subst(seed.wrapping_add(1), &pattern, &sig);
        let instance = sigma.apply(&pattern);
        let found = match_pattern(&pattern, &instance);
        prop_assert!(found.is_some(), "no match of {} against {}", pattern, instance);
        let found = found.unwrap();
        prop_assert!(found.apply(&pattern).alpha_eq(&instance));

        // soundness against an unrelated term
        let other = g.term(&l(), size);
        if let Some(s) = match_pattern(&pattern, &other) {
            prop_assert!(s.apply(&pattern).alpha_eq(&other));
        }
    }

    #[test]
    fn beta_steps_preserve_types(seed in any::<u64>(), size in 1usize..20) {
        let sig = test_signature();
        let mut g = TermGen::new(seed, &sig);
        let t = g.term(&n(), size);
        let ty = t.type_of().unwrap();
        for (p, u) in t.beta_steps() {
            prop_assert_eq!(u.type_of().unwrap(), ty.clone());
            let redex = t.subterm_at(&p).unwrap();
            prop_assert!(redex.is_beta_redex());
        }
        prop_assert_eq!(t.is_beta_normal(), t.beta_steps().is_empty());
    }

    #[test]
    fn closure_members_are_small_and_replay(seed in any::<u64>(), size in 1usize..10) {
        let sig = test_signature();
        let mut g = TermGen::new(seed, &sig);
        g.redexes = false;
        let args = vec![g.term(&Type::arrow(n(), n()), size), g.term(&l(), size)];
        let bound = args.iter().map(Term::size).max().unwrap();
        let closure = pcc_closure(&args, &sig);
        for d in closure.members() {
            prop_assert!(d.conclusion.size() <= bound);
            prop_assert!(d.replay(&args, &sig).is_ok(), "{:?}", d.replay(&args, &sig));
        }
        for a in &args {
            prop_assert!(closure.contains(a));
        }
    }

    #[test]
    fn ordering_is_irreflexive(seed in any::<u64>(), size in 1usize..12) {
        let sig = test_signature();
        let mut g = TermGen::new(seed, &sig);
        let t = g.term(&l(), size);
        let p = Precedence::parse("map>f>cons>s>nil>0").unwrap();
        prop_assert!(horpo_gt(&t, &t, &p).is_none());
        prop_assert!(horpo_gt(&t, &t, &Precedence::new()).is_none());
    }

    #[test]
    fn ordering_is_stable_under_substitution(seed in any::<u64>(), size in 2usize..12) {
        let sig = test_signature();
        let mut g = TermGen::new(seed, &sig);
        let s = g.term(&n(), size);
        let fv = s.free_vars();
        let p = Precedence::parse("map>f>cons>s>nil>0").unwrap();
        for (_, t) in s.subterms() {
            let Ok(ty) = t.type_of() else { continue };
            if ty != n() || !t.free_vars().is_subset(&fv) {
                continue;
            }
            if let Some(proof) = horpo_gt(&s, t, &p) {
                prop_assert!(proof.check(&p).is_ok());
                let sigma = random_subst(seed.rotate_left(7), &s, &sig);
                let (ss, ts) = (sigma.apply(&s), sigma.apply(t));
                prop_assert!(
                    horpo_gt(&ss, &ts, &p).is_some(),
                    "{} > {} but not {} > {}", s, t, ss, ts
                );
            }
        }
    }

    #[test]
    fn precedence_parse_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let names = ["a", "b", "c", "d", "e"];
        let mut p = Precedence::new();
        for _ in 0..6 {
            use rand::seq::SliceRandom;
            let f = names.choose(&mut r).unwrap();
            let g = names.choose(&mut r).unwrap();
            let _ = p.add(f, g);
        }
        let text = p.to_string();
        if !text.is_empty() {
            let q = Precedence::parse(&text).unwrap();
            prop_assert_eq!(q.edges(), p.edges());
        }
        for f in names {
            prop_assert!(!p.gt(f, f));
        }
    }
}
