//! Acceptance criteria, one test each. Every test writes a single
//! `criterion N: PASS|FAIL ...` line straight to stdout so the lines show up
//! without `--nocapture`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::{Duration, Instant};

use boundary_lattice::intlinalg::{
    kernel_basis, rank, same_row_lattice, smith_normal_form, to_big,
};
use boundary_lattice::local_divisors::LocalCartierChecker;
use boundary_lattice::sets::{nontrivial_partitions, proper_subsets, subsets_of};
use boundary_lattice::weights::verify_certificate;
use boundary_lattice::*;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, outcome: &Result<String, String>, elapsed: Duration) {
    let line = match outcome {
        Ok(msg) => format!("criterion {id:>2}: PASS  {msg} ({:.2?})\n", elapsed),
        Err(msg) => format!("criterion {id:>2}: FAIL  {msg} ({:.2?})\n", elapsed),
    };
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

fn criterion(id: u32, check: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    report(id, &outcome, elapsed);
    if let Err(msg) = outcome {
        panic!("criterion {id} failed: {msg}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || {
        format!("{what} took {t:.2?}, limit {limit:?}")
    })
}

fn trees_up_to(n: usize) -> Vec<ColoredTree> {
    (1..=n).flat_map(|k| enumerate_trees(k, None)).collect()
}

fn two_cherries() -> ColoredTree {
    ColoredTree::from_nested("((1,2),(3,4))").unwrap()
}

#[test]
fn criterion_01_stratum_counts() {
    criterion(1, || {
        let start = Instant::now();
        let s4 = enumerate_strata(4).map_err(err)?;
        ensure(s4.type_i.len() == 11 && s4.type_ii.len() == 14, || {
            format!(
                "n=4 gave {} type I, {} type II",
                s4.type_i.len(),
                s4.type_ii.len()
            )
        })?;
        let s2 = enumerate_strata(2).map_err(err)?;
        let total = s2.type_i.len() + s2.type_ii.len();
        ensure(total == 2, || format!("n=2 gave {total} divisors"))?;
        within(start, Duration::from_secs(1), "strata")?;
        Ok("n=4: 11 + 14, n=2: 2".into())
    });
}

#[test]
fn criterion_02_rank_formula() {
    criterion(2, || {
        let mut ranks = Vec::new();
        for n in 2..=8 {
            let start = Instant::now();
            let pp = pushpull_matrix(n).map_err(err)?;
            let r = rank(&pp.matrix).map_err(|e| e.to_string())?;
            let expected = (1usize << n) - n - 1;
            ensure(r == expected, || {
                format!("n={n}: rank {r}, expected {expected}")
            })?;
            if n == 8 {
                ensure((pp.cols.len(), pp.rows.len()) == (4139, 254), || {
                    format!("n=8 matrix is {}x{}", pp.cols.len(), pp.rows.len())
                })?;
                within(start, Duration::from_secs(300), "n=8 rank")?;
            }
            ranks.push(r);
        }
        Ok(format!("ranks {ranks:?} for n=2..8"))
    });
}

#[test]
fn criterion_03_four_point_relations() {
    criterion(3, || {
        let start = Instant::now();
        let pp = pushpull_matrix(4).map_err(err)?;
        let kernel = kernel_basis(&pp.matrix).map_err(|e| e.to_string())?;
        ensure(kernel.rows() == 3, || {
            format!("kernel rank {}", kernel.rows())
        })?;
        let rels: Vec<Vec<i64>> = [(1, 2, 3, 4), (1, 3, 2, 4), (1, 4, 2, 3)]
            .iter()
            .map(|&(i, j, k, l)| {
                let r = common::four_point_relation(i, j, k, l);
                pp.cols
                    .iter()
                    .map(|p| r.get(&p.key()).copied().unwrap_or(0))
                    .collect()
            })
            .collect();
        for r in &rels {
            let image = pp.matrix.mul_vec(&to_big(r)).map_err(|e| e.to_string())?;
            ensure(image.iter().all(Zero::is_zero), || {
                format!("{r:?} is not a relation")
            })?;
        }
        let stacked = IntMatrix::from_i64_rows(&rels, pp.cols.len()).map_err(|e| e.to_string())?;
        ensure(
            same_row_lattice(&stacked, &kernel).map_err(|e| e.to_string())?,
            || "the three relations do not span the kernel".into(),
        )?;
        within(start, Duration::from_secs(1), "relations")?;
        Ok("kernel rank 3, spanned by the three four-point relations".into())
    });
}

#[test]
fn criterion_04_two_cherries() {
    criterion(4, || {
        let t = two_cherries();
        let keys: Vec<String> = minimally_complete_subsets(&t)
            .iter()
            .map(|y| y.key())
            .collect();
        ensure(keys == ["1,2", "1,5,6", "2,3,4", "3,4,5,6"], || {
            format!("subsets {keys:?}")
        })?;

        let gens: BTreeSet<Vec<i64>> = generators(&t).into_iter().map(|v| v.0).collect();
        let expected: BTreeSet<Vec<i64>> =
            [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]]
                .into_iter()
                .collect();
        ensure(gens == expected, || format!("generators {gens:?}"))?;

        // Relations over subsets in the order 12, 156, 234, 3456.
        let checker = LocalCartierChecker::new(&t).map_err(err)?;
        let expected_rel = IntMatrix::from_i64_rows(&[vec![1, -1, -1, 1]], 4).unwrap();
        ensure(
            same_row_lattice(checker.relations(), &expected_rel).unwrap(),
            || format!("relations {:?}", checker.relations().to_i64_rows()),
        )?;
        for a in [[1, 1, 1, 1], [2, 1, 3, 2], [1, 0, 0, 1], [0, 0, 0, 0]] {
            let cond = a[0] + a[3] == a[1] + a[2];
            ensure(
                checker.decide_dense(&a).map_err(err)?.cartier == cond,
                || format!("{a:?}"),
            )?;
        }
        for a in [[1, 0, 0, 0], [0, 1, 1, 0], [2, 1, 3, 3]] {
            ensure(!checker.decide_dense(&a).map_err(err)?.cartier, || {
                format!("{a:?}")
            })?;
        }

        let subsets = checker.subsets();
        let gens: BTreeSet<Vec<i64>> = local_cartier_generators(&t)
            .iter()
            .map(|d| d.to_dense(subsets).unwrap())
            .collect();
        let expected: BTreeSet<Vec<i64>> = [vec![1, 1, 1, 1], vec![0, 0, 1, 1], vec![0, 1, 0, 1]]
            .into_iter()
            .collect();
        ensure(gens == expected, || format!("Cartier generators {gens:?}"))?;
        Ok("four subsets, four generators, one relation, three Cartier generators".into())
    });
}

#[test]
fn criterion_05_local_oracle_equivalence() {
    criterion(5, || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut cases = 0usize;
        let mut cartier = 0usize;
        let mut disagreements = Vec::new();
        for t in trees_up_to(5) {
            let checker = LocalCartierChecker::new(&t).map_err(err)?;
            let w = checker.subsets().len();
            let rays = checker.rays().to_vec();
            let gens: Vec<Vec<i64>> = local_cartier_generators(&t)
                .iter()
                .map(|d| d.to_dense(checker.subsets()).unwrap())
                .collect();
            let mut samples: Vec<Vec<i64>> = Vec::new();
            for _ in 0..30 {
                samples.push((0..w).map(|_| rng.gen_range(-2..=2)).collect());
            }
            // Combinations of the Cartier generators, clipped to the box when
            // possible, so both answers occur.
            for _ in 0..30 {
                let c: Vec<i64> = gens.iter().map(|_| rng.gen_range(-1..=1)).collect();
                let mut a = vec![0i64; w];
                for (ck, g) in c.iter().zip(&gens) {
                    for (x, y) in a.iter_mut().zip(g) {
                        *x += ck * y;
                    }
                }
                if a.iter().all(|x| x.abs() <= 2) {
                    samples.push(a);
                }
            }
            for a in samples {
                cases += 1;
                let orth = checker.orthogonality_test(&a).is_none();
                let solve = checker.functional_test(&a).map_err(err)?;
                if let Some(u) = &solve {
                    cartier += 1;
                    let reproduces = rays
                        .iter()
                        .zip(&a)
                        .all(|(v, &ay)| common::dot(&u.0, &v.0) == ay);
                    if !reproduces {
                        disagreements.push(format!("{} {a:?}: witness is wrong", t.to_nested()));
                    }
                }
                if orth != solve.is_some() {
                    disagreements.push(format!("{} {a:?}", t.to_nested()));
                }
            }
        }
        ensure(cases >= 10_000, || format!("only {cases} cases"))?;
        ensure(disagreements.is_empty(), || {
            format!(
                "{} disagreements, first {}",
                disagreements.len(),
                disagreements[0]
            )
        })?;
        Ok(format!("{cases} cases, {cartier} Cartier, 0 disagreements"))
    });
}

#[test]
fn criterion_06_global_crosscheck() {
    criterion(6, || {
        let mut summary = Vec::new();
        for n in 3..=5 {
            let start = Instant::now();
            let r = local_global_crosscheck(n).map_err(err)?;
            ensure(r.lattices_equal, || {
                format!("n={n}: lattices differ: {r:?}")
            })?;
            ensure(r.local_rejections == 0, || {
                format!("n={n}: {} rejections", r.local_rejections)
            })?;
            if n == 5 {
                within(start, Duration::from_secs(600), "n=5 crosscheck")?;
            }
            summary.push(format!(
                "n={n} rank {} over {} trees",
                r.local_rank, r.trees
            ));
        }
        Ok(summary.join(", "))
    });
}

/// Multisets on `edges` with total multiplicity at most `max`.
fn multisets(edges: &[EdgeId], max: u32) -> Vec<EdgeMultiset> {
    fn go(edges: &[EdgeId], left: u32, cur: &mut EdgeMultiset, out: &mut Vec<EdgeMultiset>) {
        let Some((&e, rest)) = edges.split_first() else {
            out.push(cur.clone());
            return;
        };
        go(rest, left, cur, out);
        for k in 1..=left {
            cur.insert(e, k);
            go(rest, left - k, cur, out);
        }
        cur.remove(&e);
    }
    let mut out = Vec::new();
    go(edges, max, &mut EdgeMultiset::new(), &mut out);
    out
}

#[test]
fn criterion_07_pairing_certificates() {
    criterion(7, || {
        let mut cases = 0usize;
        let mut equal = 0usize;
        let mut failures = Vec::new();
        for t in trees_up_to(5) {
            let edges: Vec<EdgeId> = t.edges().collect();
            let all = multisets(&edges, 4);
            for a in &all {
                let used: u32 = a.values().sum();
                for b in &all {
                    if b.values().sum::<u32>() + used > 4 || b.keys().any(|e| a.contains_key(e)) {
                        continue;
                    }
                    cases += 1;
                    let same = common::weighted_sum(&t, a) == common::weighted_sum(&t, b);
                    let cert = pairing_certificate(&t, a, b).map_err(err)?;
                    if same {
                        equal += 1;
                    }
                    match cert {
                        Some(c) if !verify_certificate(&t, a, b, &c) => {
                            failures.push(format!("{} {a:?} {b:?}: bad certificate", t.to_nested()))
                        }
                        Some(_) if !same => failures.push(format!(
                            "{} {a:?} {b:?}: certificate for unequal sums",
                            t.to_nested()
                        )),
                        None if same => {
                            failures.push(format!("{} {a:?} {b:?}: no certificate", t.to_nested()))
                        }
                        _ => {}
                    }
                }
            }
        }
        ensure(failures.is_empty(), || {
            format!("{} failures, first {}", failures.len(), failures[0])
        })?;
        Ok(format!(
            "{cases} pairs of multisets, {equal} with equal sums, 0 failures"
        ))
    });
}

#[test]
fn criterion_08_ray_count() {
    criterion(8, || {
        let mut trees = 0;
        for t in trees_up_to(6) {
            let g = generators(&t).len();
            let mcs = minimally_complete_subsets(&t).len();
            let brute = common::mcs_brute(&t).len();
            let formula = ray_count(&t) as usize;
            ensure(g == mcs && mcs == brute && brute == formula, || {
                format!(
                    "{}: |G|={g}, |MCS|={mcs}, brute {brute}, formula {formula}",
                    t.to_nested()
                )
            })?;
            trees += 1;
        }
        Ok(format!("{trees} trees"))
    });
}

#[test]
fn criterion_09_pairing_invariant() {
    criterion(9, || {
        let mut pairs = 0;
        for t in trees_up_to(6) {
            let s = common::subtree_sum(&t, t.root());
            for v in generators(&t) {
                let p = common::dot(&s, &v.0);
                ensure(p == 1, || {
                    format!("{}: <s, {:?}> = {p}", t.to_nested(), v.0)
                })?;
                pairs += 1;
            }
        }
        Ok(format!("{pairs} generator pairings equal 1"))
    });
}

#[test]
fn criterion_10_simple_partitions() {
    criterion(10, || {
        for n in 2..=8 {
            let got = simple_partitions(n).map_err(err)?.len();
            let expected = (1usize << n) - n - 1;
            ensure(got == expected, || {
                format!("n={n}: {got}, expected {expected}")
            })?;
        }
        let listed: BTreeSet<String> = [
            "1|2|3|4", "1,2|3|4", "1,3|2|4", "1,4|2|3", "1|2,3|4", "1|2,4|3", "1|2|3,4", "1,2,3|4",
            "1,3,4|2", "1,2,4|3", "1|2,3,4",
        ]
        .iter()
        .map(|k| k.parse::<Partition>().unwrap().key())
        .collect();
        let got: BTreeSet<String> = simple_partitions(4)
            .map_err(err)?
            .iter()
            .map(|p| p.key())
            .collect();
        ensure(got == listed, || format!("n=4 list {got:?}"))?;
        Ok("counts 2^n-n-1 for n=2..8, n=4 list matches".into())
    });
}

#[test]
fn criterion_11_pullbacks() {
    criterion(11, || {
        let mut checked = 0;
        for n in 2..=6 {
            let lattice = CartierLattice::new(n).map_err(err)?;
            for s in subsets_of(Subset::full(n), 2, n - 1) {
                let d = pullback_forgetful(n, s).map_err(err)?;
                ensure(lattice.is_cartier(&d).map_err(err)?, || {
                    format!("forgetful {s} for n={n}")
                })?;
                checked += 1;
            }
            for i in 1..=n as u32 {
                for j in 1..=n as u32 {
                    if i == j {
                        continue;
                    }
                    for d in [
                        pullback_fij(n, i, j).map_err(err)?,
                        pullback_fij_type_i(n, i, j).map_err(err)?,
                    ] {
                        ensure(lattice.is_cartier(&d).map_err(err)?, || {
                            format!("f_{i}{j} for n={n}")
                        })?;
                        ensure(is_cartier_global(n, &d).map_err(err)?, || {
                            format!("f_{i}{j} for n={n}")
                        })?;
                        checked += 1;
                    }
                }
            }
        }
        let f = pullback_fij(4, 1, 4).map_err(err)?;
        ensure(f.type_ii.len() == 10, || {
            format!("f_14 support {}", f.type_ii.len())
        })?;
        for (i, j, k, l) in [(1, 2, 3, 4), (1, 3, 2, 4), (1, 4, 2, 3)] {
            let r = common::four_point_relation(i, j, k, l);
            let pairing: i64 = f
                .type_ii
                .iter()
                .map(|(p, c)| c * r.get(&p.key()).copied().unwrap_or(0))
                .sum();
            ensure(pairing == 0, || {
                format!("f_14 pairs to {pairing} with relation ({i}{j}{k}{l})")
            })?;
        }
        Ok(format!(
            "{checked} pullbacks Cartier, f_14 has 10 terms and satisfies the relations"
        ))
    });
}

#[test]
fn criterion_12_witness_soundness() {
    criterion(12, || {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut summary = Vec::new();
        for n in 2..=6 {
            let lattice = CartierLattice::new(n).map_err(err)?;
            let subsets = proper_subsets(n);
            let cols = nontrivial_partitions(n);
            for _ in 0..1000 {
                let k: Vec<i64> = subsets.iter().map(|_| rng.gen_range(-3..=3)).collect();
                let image = common::pull_push_brute(&subsets, &k, &cols);
                let mut d = DivisorVector::from_type_ii_dense(n, &cols, &image);
                d.type_i.insert(Subset::full(n), rng.gen_range(-3..=3));
                let w = lattice.witness(&d).map_err(err)?;
                let back = common::pull_push_brute(&lattice.pushpull().rows, &w, &cols);
                ensure(back == image, || {
                    format!("n={n}: witness {w:?} maps to {back:?}")
                })?;
            }
            if n >= 4 {
                let relations =
                    kernel_basis(&lattice.pushpull().matrix).map_err(|e| e.to_string())?;
                for _ in 0..1000 {
                    let k: Vec<i64> = subsets.iter().map(|_| rng.gen_range(-3..=3)).collect();
                    let mut v = common::pull_push_brute(&subsets, &k, &cols);
                    // A nonzero relation r pairs to |r|^2 with itself and to 0
                    // with the image, so v + r is outside the image.
                    let mut r = vec![BigInt::zero(); cols.len()];
                    while r.iter().all(Zero::is_zero) {
                        for i in 0..relations.rows() {
                            let c = BigInt::from(rng.gen_range(-2..=2));
                            for (x, y) in r.iter_mut().zip(relations.row(i)) {
                                *x += &c * y;
                            }
                        }
                    }
                    for (x, y) in v.iter_mut().zip(&r) {
                        *x += i64::try_from(y.clone()).unwrap();
                    }
                    let d = DivisorVector::from_type_ii_dense(n, &cols, &v);
                    match lattice.witness(&d) {
                        Err(Error::NotCartier(_)) => {}
                        other => return Err(format!("n={n}: non-image vector gave {other:?}")),
                    }
                }
                summary.push(format!("n={n}: 1000 + 1000"));
            } else {
                summary.push(format!("n={n}: 1000 image (every vector is in the image)"));
            }
        }
        let d = pullback_fij(5, 2, 5).map_err(err)?;
        ensure(cartier_witness(5, &d).is_ok(), || {
            "cartier_witness on f_25".into()
        })?;
        Ok(summary.join(", "))
    });
}

#[test]
fn criterion_13_smith_saturation() {
    criterion(13, || {
        let mut sizes = BTreeMap::new();
        for n in 2..=6 {
            let pp = pushpull_matrix(n).map_err(err)?;
            let snf = smith_normal_form(&pp.matrix).map_err(|e| e.to_string())?;
            let r = snf.invariant_factors.len();
            ensure(r == (1 << n) - n - 1, || format!("n={n}: rank {r}"))?;
            ensure(snf.invariant_factors.iter().all(One::is_one), || {
                format!("n={n}: invariant factors {:?}", snf.invariant_factors)
            })?;
            let diag = snf
                .left
                .mul(&pp.matrix)
                .and_then(|m| m.mul(&snf.right))
                .map_err(|e| e.to_string())?;
            ensure(diag == snf.diagonal(), || {
                format!("n={n}: left * M * right is not diagonal")
            })?;
            sizes.insert(n, r);
        }
        Ok(format!("all invariant factors 1, ranks {sizes:?}"))
    });
}
