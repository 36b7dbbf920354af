//! Exact-arithmetic properties of relative belief, Bayes factors,
//! p-values and confidence regions on random finite models.

use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rbel::bayes::{bayes_factor, bf_predictive, spike_slab_bf, SpikeSlabPrior};
use rbel::freq::{tabular_confidence_region, tabular_p_value, Tail, TestSpec};
use rbel::relbel::{gamma_region, rb_curve, rb_set, rb_union, rb_via_predictive, Direction};
use rbel::{condition, MarginalMap, MassTable, ParamGrid, Point, Rational, TabularModel};

fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

#[derive(Debug, Clone)]
struct Case {
    prior: MassTable<Rational>,
    model: TabularModel<Rational>,
    observed: usize,
    map: MarginalMap<Rational>,
}

fn atoms(n: usize) -> Arc<ParamGrid<Rational>> {
    Arc::new(ParamGrid::atoms((0..n as i64).map(q).collect()).unwrap())
}

fn model_from(rows: Vec<Vec<i64>>) -> TabularModel<Rational> {
    let nx = rows[0].len();
    let rows = rows
        .into_iter()
        .map(|mut r| {
            if r.iter().all(|&w| w == 0) {
                r[0] = 1;
            }
            let s: i64 = r.iter().sum();
            r.into_iter().map(|w| Rational::new(w, s)).collect()
        })
        .collect();
    TabularModel::from_rows((0..nx).map(|x| format!("x{x}")).collect(), rows).unwrap()
}

fn rows(nt: usize, nx: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(0i64..6, nx), nt)
}

/// Random model, positive prior, observed point with positive predictive
/// probability, and a random coarsening map.
fn case() -> impl Strategy<Value = Case> {
    (2usize..6, 2usize..6)
        .prop_flat_map(|(nt, nx)| {
            (rows(nt, nx), prop::collection::vec(1i64..6, nt), 0..nx, prop::collection::vec(0i64..3, nt))
        })
        .prop_map(|(r, pw, x, psi)| {
            let model = model_from(r);
            let grid = atoms(pw.len());
            let prior = MassTable::from_weights(grid.clone(), pw.into_iter().map(q).collect()).unwrap();
            // rows are normalized and the prior is positive, so some x has m(x) > 0
            let observed = (x..x + model.n_samples())
                .map(|k| k % model.n_samples())
                .find(|&k| (0..model.n_thetas()).any(|t| !model.prob(t, k).is_zero()))
                .unwrap();
            let map = MarginalMap::from_values(grid, psi.into_iter().map(|v| Point::scalar(q(v))).collect()).unwrap();
            Case { prior, model, observed, map }
        })
}

proptest! {
    #[test]
    fn prior_expectation_of_rb_is_one(c in case()) {
        let post = condition(&c.prior, &c.model, &c.observed).unwrap();
        for map in [None, Some(&c.map)] {
            let curve = rb_curve(&c.prior, &post, map).unwrap();
            let e = curve
                .values()
                .iter()
                .zip(curve.prior_mass())
                .filter_map(|(r, p)| r.map(|r| r * p))
                .sum::<Rational>();
            prop_assert_eq!(e, Rational::one());
        }
    }

    #[test]
    fn ratio_equals_predictive_form(c in case()) {
        let post = condition(&c.prior, &c.model, &c.observed).unwrap();
        let curve = rb_curve(&c.prior, &post, Some(&c.map)).unwrap();
        for psi in 0..curve.len() {
            let direct = rb_via_predictive(&c.model, &c.prior, &c.map, &c.observed, psi).unwrap();
            prop_assert_eq!(curve.rb_at(psi).unwrap(), &direct);
        }
    }

    #[test]
    fn union_additivity(
        w in prop::collection::vec(0i64..5, 6),
        a in prop::collection::vec(any::<bool>(), 6),
        b in prop::collection::vec(any::<bool>(), 6),
        cset in prop::collection::vec(any::<bool>(), 6),
    ) {
        let mut w = w;
        let mut cset = cset;
        cset[0] = true;
        w[0] += 1;
        let space = MassTable::from_weights(atoms(6), w.into_iter().map(q).collect()).unwrap();
        let idx = |p: &Point<Rational>| p.first().to_integer() as usize;
        let inside = |s: &Vec<bool>| { let s = s.clone(); move |p: &Point<Rational>| s[idx(p)] };
        let pu = rbel::prob_of(&space, |p| a[idx(p)] || b[idx(p)]);
        prop_assume!(pu > Rational::zero());
        let d = rb_union(&space, inside(&cset), inside(&a), inside(&b)).unwrap();
        prop_assert_eq!(&d.lhs, &d.rhs);
        let direct = rb_set(&space, inside(&cset), |p| a[idx(p)] || b[idx(p)]).unwrap();
        prop_assert_eq!(d.lhs, direct.rb);
    }

    #[test]
    fn set_rb_is_symmetric(
        w in prop::collection::vec(0i64..5, 6),
        a in prop::collection::vec(any::<bool>(), 6),
        cset in prop::collection::vec(any::<bool>(), 6),
    ) {
        let space = MassTable::from_weights(atoms(6), w.into_iter().map(|v| q(v + 1)).collect()).unwrap();
        let idx = |p: &Point<Rational>| p.first().to_integer() as usize;
        let fwd = rb_set(&space, |p| cset[idx(p)], |p| a[idx(p)]);
        let back = rb_set(&space, |p| a[idx(p)], |p| cset[idx(p)]);
        match (fwd, back) {
            (Ok(f), Ok(b)) => prop_assert_eq!(f.rb, b.rb),
            (f, b) => prop_assert!(f.is_err() && b.is_err()),
        }
    }

    #[test]
    fn two_point_directions_are_opposite(c in case()) {
        let two = MarginalMap::from_values(
            c.prior.grid().clone(),
            (0..c.prior.len()).map(|i| Point::scalar(q(i64::from(i == 0)))).collect(),
        ).unwrap();
        let post = condition(&c.prior, &c.model, &c.observed).unwrap();
        let curve = rb_curve(&c.prior, &post, Some(&two)).unwrap();
        let d0 = Direction::of(curve.rb_at(0).unwrap());
        let d1 = Direction::of(curve.rb_at(1).unwrap());
        let expected = match d0 {
            Direction::InFavor => Direction::Against,
            Direction::Against => Direction::InFavor,
            Direction::Neutral => Direction::Neutral,
        };
        prop_assert_eq!(d1, expected);
    }

    #[test]
    fn relabeling_parameter_points(c in case(), shift in 1usize..5) {
        // rotate the θ labels together with the model rows and the prior
        let n = c.prior.len();
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let rows: Vec<Vec<Rational>> = perm.iter().map(|&t| c.model.dense_row(t)).collect();
        let model = TabularModel::from_rows(c.model.labels().to_vec(), rows).unwrap();
        let prior = MassTable::new(c.prior.grid().clone(), perm.iter().map(|&t| *c.prior.mass(t)).collect()).unwrap();
        let a = rb_curve(&c.prior, &condition(&c.prior, &c.model, &c.observed).unwrap(), None).unwrap();
        let b = rb_curve(&prior, &condition(&prior, &model, &c.observed).unwrap(), None).unwrap();
        for (i, &t) in perm.iter().enumerate() {
            prop_assert_eq!(b.rb_at(i).unwrap(), a.rb_at(t).unwrap());
        }
    }

    #[test]
    fn relabeling_the_parameter_of_interest(c in case()) {
        // ψ ↦ 10 − 3ψ is a bijection of the codomain
        let post = condition(&c.prior, &c.model, &c.observed).unwrap();
        let a = rb_curve(&c.prior, &post, Some(&c.map)).unwrap();
        let values: Vec<Point<Rational>> = c.map.assignment().iter()
            .map(|&j| Point::scalar(q(10) - q(3) * c.map.codomain().point(j).first()))
            .collect();
        let relabeled = MarginalMap::from_values(c.prior.grid().clone(), values).unwrap();
        let b = rb_curve(&c.prior, &post, Some(&relabeled)).unwrap();
        for theta in 0..c.prior.len() {
            prop_assert_eq!(
                a.rb_at(c.map.assignment()[theta]).unwrap(),
                b.rb_at(relabeled.assignment()[theta]).unwrap()
            );
        }
    }

    #[test]
    fn bayes_factor_odds_equals_predictive(c in case(), pick in prop::collection::vec(any::<bool>(), 6)) {
        let post = condition(&c.prior, &c.model, &c.observed).unwrap();
        let subset = |p: &Point<Rational>| pick[p.first().to_integer() as usize];
        let odds = bayes_factor(&c.prior, &post, subset);
        let pred = bf_predictive(&c.model, &c.prior, subset, &c.observed);
        match (odds, pred) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.bf, b.bf);
                prop_assert_eq!(a.posterior_odds, b.posterior_odds);
            }
            (Err(_), _) | (_, Err(_)) => {}
        }
    }

    #[test]
    fn spike_slab_bf_does_not_depend_on_p(c in case(), p1 in 1i64..10, p2 in 1i64..10) {
        let s1 = SpikeSlabPrior::from_base(Rational::new(p1, 10), 0, &c.prior).unwrap();
        let s2 = SpikeSlabPrior::from_base(Rational::new(p2, 10), 0, &c.prior).unwrap();
        if let (Ok(a), Ok(b)) = (spike_slab_bf(&c.model, &s1, &c.observed), spike_slab_bf(&c.model, &s2, &c.observed)) {
            prop_assert_eq!(&a.bf, &b.bf);
            let mix = s1.mixture();
            let post = condition(&mix, &c.model, &c.observed).unwrap();
            let odds = bayes_factor(&mix, &post, |p| p.first().is_zero()).unwrap();
            prop_assert_eq!(odds.bf, a.bf);
        }
    }

    #[test]
    fn gamma_regions_are_nested(c in case(), g1 in 0i64..=20, g2 in 0i64..=20) {
        let (lo, hi) = (g1.min(g2), g1.max(g2));
        let post = condition(&c.prior, &c.model, &c.observed).unwrap();
        let curve = rb_curve(&c.prior, &post, Some(&c.map)).unwrap();
        let small = gamma_region(&curve, Rational::new(lo, 20)).unwrap();
        let big = gamma_region(&curve, Rational::new(hi, 20)).unwrap();
        prop_assert!(small.members.iter().all(|m| big.members.contains(m)));
        prop_assert!(small.content <= big.content);
        prop_assert!(big.content >= Rational::new(hi, 20));
    }

    #[test]
    fn p_values_are_subuniform(
        r in rows(3, 6),
        stat in prop::collection::vec(-3i64..4, 6),
        theta0 in 0usize..3,
        a in 1i64..=20,
        two_sided in any::<bool>(),
    ) {
        let model = model_from(r);
        let tail = if two_sided { Tail::TwoSided } else { Tail::Greater };
        let test = TestSpec::table(stat.into_iter().map(q).collect(), tail);
        let alpha = Rational::new(a, 20);
        let size: Rational = (0..model.n_samples())
            .filter(|&x| tabular_p_value(&test, &model, theta0, x).unwrap() <= alpha)
            .map(|x| model.prob(theta0, x))
            .sum();
        prop_assert!(size <= alpha);
    }

    #[test]
    fn confidence_regions_shrink_as_alpha_grows(
        r in rows(5, 6),
        stat in prop::collection::vec(-3i64..4, 6),
        x in 0usize..6,
        a1 in 1i64..=20,
        a2 in 1i64..=20,
    ) {
        let model = model_from(r);
        let test = TestSpec::table(stat.into_iter().map(q).collect(), Tail::TwoSided);
        let (lo, hi) = (Rational::new(a1.min(a2), 20), Rational::new(a1.max(a2), 20));
        let wide = tabular_confidence_region(&test, &model, x, lo).unwrap();
        let narrow = tabular_confidence_region(&test, &model, x, hi).unwrap();
        prop_assert!(narrow.iter().all(|i| wide.contains(i)));
    }
}
