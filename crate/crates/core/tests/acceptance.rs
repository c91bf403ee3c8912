//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line. Arithmetic is exact, so every tolerance is zero unless a
//! certified bound is named.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use torcode::betasym::{self, Compactum, SymWord, Tail};
use torcode::binforms::{self, associated_form, BinForm};
use torcode::coding::{self, CodingSpec, TorusPoint};
use torcode::glz::{self, RatPoint};
use torcode::mat::{Mat2, UniMat};
use torcode::qfield::{self, QuadExt};

mod common;
use common::{admissible_word, random_hyperbolic, random_unimodular};

/// Runs one criterion, prints its verdict line and fails the test on FAIL.
fn criterion(
    n: u32,
    title: &str,
    limit: Option<Duration>,
    body: impl FnOnce() -> Result<(), String>,
) {
    let start = Instant::now();
    let outcome = body();
    let took = start.elapsed();
    let outcome = match (outcome, limit) {
        (Ok(()), Some(l)) if took > l => Err(format!("took {took:?}, limit {l:?}")),
        (o, _) => o,
    };
    match &outcome {
        Ok(()) => println!("criterion {n:>2} PASS  {title} ({took:.2?})"),
        Err(e) => println!("criterion {n:>2} FAIL  {title}: {e}"),
    }
    if let Err(e) = outcome {
        panic!("criterion {n} failed: {e}");
    }
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

#[test]
fn criterion_01_fibonacci_five_to_one() {
    criterion(
        1,
        "Fibonacci 5-to-1 coding and its kernel",
        Some(Duration::from_secs(1)),
        || {
            let m = UniMat::from_i64(1, 1, 1, 0);
            let d = big(5);
            let spec = CodingSpec::from_i64(&m, 3, 1).map_err(e)?;
            check(spec.point.xi == QuadExt::one(&d), || "ξ ≠ 1".into())?;
            check(coding::multiplicity(&spec).map_err(e)? == big(5), || {
                "K ≠ 5".into()
            })?;
            let bac = CodingSpec::from_i64(&m, -1, -1).map_err(e)?;
            check(bac.point.xi == QuadExt::sqrt_d(&d).inv().unwrap(), || {
                "ξ_bac ≠ 1/√5".into()
            })?;
            let k = coding::kernel_of_coding(&spec, &bac).map_err(e)?;
            let pt = |x, y| RatPoint::from_ints(x, 5, y, 5);
            let mut want = vec![pt(0, 0), pt(1, 2), pt(3, 1), pt(4, 3), pt(2, 4)];
            want.sort();
            check(k.elements.as_ref() == Some(&want), || {
                format!("kernel {:?}", k.elements)
            })?;
            let cycle = [pt(1, 2), pt(3, 1), pt(4, 3), pt(2, 4)];
            for i in 0..4 {
                let img = cycle[i].apply(m.mat());
                check(img == cycle[(i + 1) % 4], || {
                    format!("M·{} = {img}", cycle[i])
                })?;
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_02_bac_verdicts() {
    criterion(2, "BAC verdict table", Some(Duration::from_secs(5)), || {
        let m = UniMat::from_i64(3, 5, 1, 2);
        let f = associated_form(&m).map_err(e)?;
        check(f.eval(&big(0), &big(1)).abs().is_one(), || {
            "f(0,1) ≠ ±1".into()
        })?;
        let b = glz::intertwiner(&m, &big(0), &big(1));
        check(b == Mat2::from_i64(0, 1, 1, -3), || format!("B = {b}"))?;
        let c = glz::companion(&big(5), 1).map_err(e)?;
        check(&b * m.mat() == c.mat() * &b, || "B·M ≠ C·B".into())?;
        check(
            !coding::enumerate_bac(&m, 0..=0).map_err(e)?.is_empty(),
            || "no BAC for [[3,5],[1,2]]".into(),
        )?;
        check(
            glz::conjugator_to_companion(&m).map_err(e)?.is_some(),
            || "no conjugator".into(),
        )?;

        for (mat, mn) in [((5, 3, 2, 1), 2), ((27, 11, 5, 2), 5), ((80, 9, 9, 1), 9)] {
            let m = UniMat::from_i64(mat.0, mat.1, mat.2, mat.3);
            check(
                coding::enumerate_bac(&m, 0..=0).map_err(e)?.is_empty(),
                || format!("{m} has a BAC"),
            )?;
            check(
                glz::conjugator_to_companion(&m).map_err(e)?.is_none(),
                || format!("{m} conjugates"),
            )?;
            let (got, members) = coding::enumerate_mac(&m).map_err(e)?;
            check(got == big(mn), || format!("{m}: m = {got}"))?;
            for mem in &members {
                check(mem.spec.multiplicity == big(mn), || {
                    "MAC member multiplicity".into()
                })?;
            }
            if mn == 9 {
                check(members.len() == 2, || {
                    format!("{} base orbits", members.len())
                })?;
                let iso = glz::kernel_isomorphic_under_t(
                    &m,
                    &members[0].kernel,
                    &members[1].kernel,
                    glz::KERNEL_ISO_BOUND,
                );
                check(!iso, || "kernels are T-isomorphic".into())?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_03_small_discriminants() {
    criterion(
        3,
        "conjugacy to companions for D < 20, classes for D = 20, 32",
        None,
        || {
            let mut rng = StdRng::seed_from_u64(2024);
            for (r, sigma) in [(1, -1), (2, -1), (3, -1), (3, 1), (4, 1)] {
                let c = glz::companion(&big(r), sigma).map_err(e)?;
                let mut done = 0;
                while done < 100 {
                    let len = rng.gen_range(1..8);
                    let b = random_unimodular(&mut rng, len);
                    let m = (b.mat() * c.mat()) * b.inverse().into_mat();
                    if m.height() > big(30) {
                        continue;
                    }
                    let m = UniMat::new(m).unwrap();
                    let w = glz::conjugator_to_companion(&m)
                        .map_err(e)?
                        .ok_or_else(|| format!("{m} has no conjugator"))?;
                    check(w.mat() * m.mat() == c.mat() * w.mat(), || {
                        format!("witness {w} fails on {m}")
                    })?;
                    done += 1;
                }
            }
            // D = 20: [[4,1],[1,0]] (primitive) and [[3,2],[2,1]] = [[1,1],[1,0]]³.
            let a = UniMat::from_i64(4, 1, 1, 0);
            let b = UniMat::from_i64(3, 2, 2, 1);
            check(glz::is_primitive(&a).map_err(e)?.primitive, || {
                "[[4,1],[1,0]] not primitive".into()
            })?;
            let pb = glz::is_primitive(&b).map_err(e)?;
            check(pb.root == Some((UniMat::from_i64(1, 1, 1, 0), 3)), || {
                format!("{pb:?}")
            })?;
            check(glz::is_conjugate(&a, &b).map_err(e)?.is_none(), || {
                "D=20 classes merge".into()
            })?;
            // D = 32: companion (6,+1) and [[5,2],[2,1]] = [[2,1],[1,0]]².
            let a = glz::companion(&big(6), 1).map_err(e)?;
            let b = UniMat::from_i64(5, 2, 2, 1);
            let pb = glz::is_primitive(&b).map_err(e)?;
            check(pb.root == Some((UniMat::from_i64(2, 1, 1, 0), 2)), || {
                format!("{pb:?}")
            })?;
            check(glz::is_primitive(&a).map_err(e)?.primitive, || {
                "companion (6,+1) not primitive".into()
            })?;
            check(glz::is_conjugate(&a, &b).map_err(e)?.is_none(), || {
                "D=32 classes merge".into()
            })?;
            // random conjugates of each representative land in its class
            for rep in [
                UniMat::from_i64(4, 1, 1, 0),
                UniMat::from_i64(3, 2, 2, 1),
                glz::companion(&big(6), 1).map_err(e)?,
                UniMat::from_i64(5, 2, 2, 1),
            ] {
                for _ in 0..10 {
                    let len = rng.gen_range(1..6);
                    let u = random_unimodular(&mut rng, len);
                    let m = UniMat::new((u.mat() * rep.mat()) * u.inverse().into_mat()).unwrap();
                    let w = glz::is_conjugate(&m, &rep)
                        .map_err(e)?
                        .ok_or_else(|| format!("{m} ≁ {rep}"))?;
                    check(w.mat() * m.mat() == rep.mat() * w.mat(), || {
                        "bad witness".into()
                    })?;
                }
            }
            Ok(())
        },
    );
}

/// Solutions of `5x² − xy − y² = m` with `|x|, |y| ≤ bound`, in machine integers.
fn brute_count(m: i64, bound: i64) -> usize {
    let mut n = 0;
    for x in -bound..=bound {
        for y in -bound..=bound {
            if 5 * x * x - x * y - y * y == m {
                n += 1;
            }
        }
    }
    n
}

#[test]
fn criterion_04_form_facts() {
    criterion(4, "form facts and the automorph identity", None, || {
        let f = BinForm::from_i64(5, -1, -1).map_err(e)?;
        check(
            !binforms::represent(&f, &big(-1)).map_err(e)?.is_empty(),
            || "−1 not represented".into(),
        )?;
        check(
            binforms::represent(&f, &big(1)).map_err(e)?.is_empty(),
            || "+1 represented".into(),
        )?;
        check(brute_count(-1, 1000) > 0, || "brute force misses −1".into())?;
        check(brute_count(1, 1000) == 0, || "brute force finds +1".into())?;
        let g = BinForm::from_i64(6, -2, -6).map_err(e)?;
        check(!g.is_primitive(), || "6x²−2xy−6y² primitive".into())?;
        check(
            glz::is_primitive(&UniMat::from_i64(7, 6, 6, 5))
                .map_err(e)?
                .primitive,
            || "[[7,6],[6,5]] not primitive".into(),
        )?;
        let mut rng = StdRng::seed_from_u64(33);
        for _ in 0..200 {
            let m = random_hyperbolic(&mut rng);
            let f = associated_form(&m).map_err(e)?;
            // doubled Gram matrix [[2a, b], [b, 2c]]
            let gram = Mat2::new(&f.a * 2, f.b.clone(), f.b.clone(), &f.c * 2);
            let lhs = &(m.mat() * &gram) * &m.mat().transpose();
            let rhs = gram.scale(&big(m.det() as i64));
            check(lhs == rhs, || format!("identity fails for {m}"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_05_multiplicity_agreement() {
    criterion(
        5,
        "multiplicity: form value, determinant, domain area",
        None,
        || {
            let mut rng = StdRng::seed_from_u64(55);
            for _ in 0..10 {
                let m = random_hyperbolic(&mut rng);
                let f = associated_form(&m).map_err(e)?;
                for _ in 0..50 {
                    let (p, q) = (rng.gen_range(-20..=20i64), rng.gen_range(-20..=20i64));
                    if p == 0 && q == 0 {
                        continue;
                    }
                    let s = CodingSpec::from_i64(&m, p, q).map_err(e)?;
                    let k = f.eval(&big(p), &big(q)).abs();
                    check(
                        coding::determinant_area(&s) == QuadExt::integer(k.clone(), &s.d()),
                        || "determinant formula".into(),
                    )?;
                    let area = coding::fundamental_domain(&s).map_err(e)?.area;
                    check(area == QuadExt::integer(k, &s.d()), || {
                        format!("area on {m} ({p},{q})")
                    })?;
                }
            }
            for (r, sigma) in [(1, -1), (2, -1), (3, -1), (3, 1), (5, 1)] {
                let r = big(r);
                let d = qfield::radicand(&r, sigma);
                check(
                    coding::pi_area(&r, sigma).map_err(e)? == QuadExt::sqrt_d(&d),
                    || "area of Π".into(),
                )?;
                let m = glz::companion(&r, sigma).map_err(e)?;
                let lam = qfield::lambda(&r, sigma).map_err(e)?;
                let xi = QuadExt::integer(big(-sigma as i64), &d);
                let eta = (&(&lam - &QuadExt::integer(m.a().clone(), &d)) * &xi)
                    .checked_div(&QuadExt::integer(m.b().clone(), &d))
                    .map_err(e)?;
                let (p, q) = coding::params_for_point(&m, &xi, &eta)
                    .map_err(e)?
                    .ok_or("ξ = −σ point not homoclinic")?;
                let s = CodingSpec::new(&m, &p, &q).map_err(e)?;
                check(s.multiplicity == d, || {
                    format!("ξ = −σ coding of {m}: K = {}", s.multiplicity)
                })?;
            }
            Ok(())
        },
    );
}

/// Minimal `(x + y√D)/2` with `x² − Dy² = ±4`, `y > 0`, by brute force.
fn brute_pell(d: i64) -> QuadExt {
    for y in 1i64.. {
        for x in 1i64..=(2 + (d as f64).sqrt() as i64 * y + 2) {
            let v = x * x - d * y * y;
            if v == 4 || v == -4 {
                return QuadExt::from_i64(x, y, 2, d).unwrap();
            }
        }
    }
    unreachable!()
}

#[test]
fn criterion_06_units_and_exceptional_case() {
    criterion(6, "unit groups and the exceptional companion", None, || {
        let m = UniMat::from_i64(3, 1, -1, 0);
        let d = big(5);
        let theta = QuadExt::from_i64(1, 1, 2, 5).unwrap();
        let root = QuadExt::sqrt_d(&d);
        let list = coding::enumerate_bac(&m, -3..=3).map_err(e)?;
        check(list.len() == 14, || format!("{} members", list.len()))?;
        for s in &list {
            check(s.multiplicity.is_one(), || "member not bijective".into())?;
            let u = &s.point.xi * &root;
            let hit = (-3..=3).any(|k| {
                let t = theta.pow(k).unwrap();
                u == t || u == -t
            });
            check(hit, || format!("ξ√5 = {u} is not ±θ^k"))?;
        }
        let ug = qfield::unit_group_of_order(&big(4), -1).map_err(e)?;
        check(ug.exponent_index == 3, || {
            format!("exponent index {}", ug.exponent_index)
        })?;
        for dd in [5, 8, 12, 13, 20, 21, 29, 32, 40] {
            let got =
                qfield::pell_fundamental_unit(&big(dd), qfield::PELL_DEFAULT_BOUND).map_err(e)?;
            let want = brute_pell(dd);
            check(got == want, || format!("D={dd}: {got} vs {want}"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_07_symbolic_suite() {
    criterion(
        7,
        "compacta, normalization, relations, homomorphism",
        None,
        || {
            for r in 1..=6u32 {
                check(
                    betasym::derive_compactum(r, -1).map_err(e)? == Compactum::markov(r),
                    || format!("X_{r}"),
                )?;
                if r >= 3 {
                    check(
                        betasym::derive_compactum(r, 1).map_err(e)? == Compactum::sofic(r),
                        || format!("Y_{r}"),
                    )?;
                }
            }
            let mut rng = StdRng::seed_from_u64(77);
            for i in 0..500 {
                let r = rng.gen_range(1..=5u32);
                let c = if i % 2 == 0 || r < 3 {
                    Compactum::markov(r)
                } else {
                    Compactum::sofic(r)
                };
                let len = rng.gen_range(1..8);
                let raw: Vec<i64> = (0..len).map(|_| rng.gen_range(0..=2 * r as i64)).collect();
                let off = rng.gen_range(-4..4);
                let w = betasym::normalize(off, &raw, &c).map_err(e)?;
                let lam = c.lambda();
                let mut want = QuadExt::zero(lam.d());
                for (k, &x) in raw.iter().enumerate() {
                    want = &want + &lam.pow(-(off + k as i64)).unwrap().mul_int(&big(x));
                }
                check(betasym::value(&w, &c) == want, || {
                    format!("value changed for {raw:?}")
                })?;
                check(betasym::is_admissible(&w, &c), || {
                    format!("{w} inadmissible")
                })?;
                let again = betasym::canonicalize_identified(&w, &c).map_err(e)?;
                check(again == w, || format!("not idempotent on {w}"))?;
            }
            for r in 1..=6u32 {
                let c = Compactum::markov(r);
                for n in -3..=3i64 {
                    let lhs = betasym::normalize(n, &[r as i64, 1], &c).map_err(e)?;
                    check(lhs == SymWord::unit(n - 1), || {
                        format!("r u_n + u_(n+1) on r={r}")
                    })?;
                }
                if r >= 3 {
                    let c = Compactum::sofic(r);
                    for n in -2..=2i64 {
                        for big_n in n + 1..n + 7 {
                            // (r−1) u_n + (r−2)(u_{n+1} + … + u_{N−1}) + (r−1) u_N
                            let mut raw = vec![r as i64 - 2; (big_n - n + 1) as usize];
                            raw[0] = r as i64 - 1;
                            *raw.last_mut().unwrap() = r as i64 - 1;
                            let rhs = betasym::value(
                                &SymWord {
                                    offset: n,
                                    core: raw.iter().map(|&x| x as u32).collect(),
                                    left_tail: Tail::Zero,
                                    right_tail: Tail::Zero,
                                },
                                &c,
                            );
                            let lhs = betasym::value(&SymWord::unit(n - 1), &c)
                                + betasym::value(&SymWord::unit(big_n + 1), &c);
                            check(lhs == rhs, || {
                                format!("sofic relation r={r} n={n} N={big_n}")
                            })?;
                        }
                    }
                }
            }
            let m = UniMat::from_i64(1, 1, 1, 0);
            let bac = CodingSpec::from_i64(&m, -1, -1).map_err(e)?;
            let c = bac.compactum().map_err(e)?;
            for _ in 0..100 {
                let a = admissible_word(&mut rng, &c, 8);
                let b = admissible_word(&mut rng, &c, 8);
                let s = betasym::word_add(&a, &b, &c).map_err(e)?;
                let lhs = coding::phi_eval(&bac, &s).map_err(e)?;
                let rhs = coding::phi_eval(&bac, &a)
                    .map_err(e)?
                    .add(&coding::phi_eval(&bac, &b).map_err(e)?);
                check(lhs == rhs, || format!("φ({a} ⊕ {b})"))?;
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_08_decode_round_trip() {
    criterion(
        8,
        "decode under the Fibonacci BAC at window 40",
        Some(Duration::from_secs(10)),
        || {
            let m = UniMat::from_i64(1, 1, 1, 0);
            let bac = CodingSpec::from_i64(&m, -1, -1).map_err(e)?;
            let d = big(5);
            let bound = bac.lambda().pow(-38).unwrap();
            let mut targets: Vec<RatPoint> = [(0, 0), (1, 2), (3, 1), (4, 3), (2, 4)]
                .iter()
                .map(|&(x, y)| RatPoint::from_ints(x, 5, y, 5))
                .collect();
            let mut rng = StdRng::seed_from_u64(88);
            for _ in 0..50 {
                let den = rng.gen_range(1..=64i64);
                targets.push(RatPoint::from_ints(
                    rng.gen_range(0..den),
                    den,
                    rng.gen_range(0..den),
                    den,
                ));
            }
            for p in targets {
                let t = TorusPoint::from_rational(&p, &d);
                let w = coding::decode(&bac, &t, 40).map_err(e)?;
                let got = coding::phi_eval(&bac, &w).map_err(e)?;
                check(got == t || got.dist(&t) <= bound, || {
                    format!("decode of {p} misses")
                })?;
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_09_pisot_decay() {
    criterion(9, "decay of homoclinic elements", None, || {
        let mut rng = StdRng::seed_from_u64(99);
        let half = QuadExt::from_i64(1, 0, 2, 5)
            .unwrap()
            .to_rational()
            .unwrap();
        for (r, sigma) in [(1i64, -1i8), (2, -1), (3, 1), (5, 1)] {
            let r = big(r);
            let lam = qfield::lambda(&r, sigma).map_err(e)?;
            let d = lam.d().clone();
            let root = QuadExt::sqrt_d(&d);
            let lbar = lam.conj().abs();
            for _ in 0..5 {
                let (a, b) = (rng.gen_range(-30..=30i64), rng.gen_range(-30..=30i64));
                if a == 0 && b == 0 {
                    continue;
                }
                let x = lam
                    .mul_int(&big(b))
                    .add_int(&big(a))
                    .checked_div(&root)
                    .map_err(e)?;
                check(coding::pisot_member(&x, &r, sigma).map_err(e)?, || {
                    format!("{x} not a member")
                })?;
                let dist = coding::homoclinic_decay_check(&x, &r, sigma, 60).map_err(e)?;
                check(dist.len() == 61, || format!("{} distances", dist.len()))?;
                // past the first n with |x̄|·|λ̄|ⁿ < 1/2 the distance is exactly that
                let halfq = QuadExt::rational(&half, &d);
                let mut bound = x.conj().abs();
                let mut n0 = None;
                for (n, dn) in dist.iter().enumerate().take(61) {
                    if n0.is_none() && bound < halfq {
                        n0 = Some(n);
                    }
                    if n0.is_some() {
                        check(*dn == bound, || format!("‖xλ^{n}‖ for {x}"))?;
                    }
                    bound = &bound * &lbar;
                }
                check(n0.is_some_and(|n| n < 40), || {
                    format!("no threshold for {x}")
                })?;
            }
            // non-members: y/(k√D) with y ∉ k·Z[λ]
            for k in [2i64, 3] {
                let x = lam
                    .add_int(&big(1))
                    .checked_div(&root.mul_int(&big(k)))
                    .map_err(e)?;
                check(!coding::pisot_member(&x, &r, sigma).map_err(e)?, || {
                    format!("{x} is a member")
                })?;
                check(
                    coding::homoclinic_decay_check(&x, &r, sigma, 10).is_err(),
                    || "decay accepted".into(),
                )?;
                // the distances do not tend to 0: some n in [40, 80) has ‖xλⁿ‖ ≥ 1/(2k)
                let floor = QuadExt::rational(&BigRational::new(big(1), big(2 * k)), &d);
                let mut p = &x * &lam.pow(40).unwrap();
                let mut found = false;
                for _ in 40..80 {
                    if p.dist_to_int() >= floor {
                        found = true;
                    }
                    p = &p * &lam;
                }
                check(found, || format!("{x} appears to decay"))?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_10_orbit_spans() {
    criterion(10, "orbit spans and the cover bound", None, || {
        let mut rng = StdRng::seed_from_u64(1010);
        for _ in 0..500 {
            let m = random_hyperbolic(&mut rng);
            let (x, y) = (rng.gen_range(-15..=15i64), rng.gen_range(-15..=15i64));
            if x == 0 && y == 0 {
                continue;
            }
            let full = glz::orbit_span_full(&m, &big(x), &big(y)).map_err(e)?;
            let index = glz::orbit_span_index(&m, &big(x), &big(y), 3);
            check(full == index.is_one(), || {
                format!("{m} ({x},{y}): index {index}")
            })?;
        }
        let b = glz::min_orbit_cover_bound(&UniMat::from_i64(5, 3, 2, 1)).map_err(e)?;
        check(b.bound == big(2), || format!("bound {}", b.bound))?;
        check(b.note.is_some(), || "no refinement note".into())?;
        Ok(())
    });
}
