use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use fpcx::complexity::additive::{condition34_check, green_ruzsa_verify};
use fpcx::complexity::{t2_character_identity_check, theorem1_condition, theorem1_crossover, PartitionInstance};
use fpcx::curves::{self, BilinearInstance};
use fpcx::field::{is_prime, FiniteField, PrimeField};
use fpcx::subsets::ResidueSet;
use fpcx::sums::additive::{ehn_sum, inverse_complete_sum, lemma1_decomposition_check};
use fpcx::sums::characters::{cauchy_schwarz_bound_check, orthogonality_check, random_weil_instance, weil_lemma3_check, CharacterTable};
use fpcx::sums::fourier::fourier_check;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::commands::{fourier_checks, instance, lemma1_findings, line_findings, relation9_findings, rng, EXEC};
use crate::report::{Report, Table};
use crate::Opts;

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Complete inverse sums equal -1.
    Eq5,
    /// Bound on sums of inverses of shifted arguments.
    Thm5,
    /// Bilinear sum against the point-count histogram, and its bounds.
    Thm2,
    /// Few λ with large point-count deviation.
    Prop2,
    /// Difference between the full and torus variety sums.
    Rel9,
    /// The φ-identity by full enumeration.
    Phi,
    /// Zeros on the excluded lines.
    Eq16,
    /// Completing the last variable of a single-frequency sum.
    Lemma1,
    /// Fourier expansion of an interval indicator.
    Fourier,
    /// Orthogonality, second moment and the Cauchy–Schwarz bound.
    Chars,
    /// Character sums of polynomials.
    Lemma3,
    /// The character expansion of the pattern count T_2.
    T2,
    /// Sumset lower bound.
    Pollard,
    /// Pairs (s, s') driving the α branch of the construction.
    Cond34,
    /// Sign of the sufficient condition for K_3 ≥ k, with its crossover.
    Thm1,
    /// Exceptional λ and containment of large deviations.
    Exceptional,
    /// Newton polygon of g_λ.
    Newton,
}

fn ks(o: &Opts, default: std::ops::RangeInclusive<usize>) -> Vec<usize> {
    o.k.map_or_else(|| default.collect(), |k| vec![k])
}

fn primes_or_pmax(o: &Opts, default_max: u64) -> Result<Vec<u64>> {
    match (&o.p, o.pmax) {
        (Some(_), _) => o.primes(),
        (None, m) => Ok((3..=m.unwrap_or(default_max)).filter(|&x| is_prime(x)).collect()),
    }
}

pub fn run(kind: CheckKind, o: &Opts, r: &mut Report) -> Result<()> {
    let mut rng = rng(o);
    match kind {
        CheckKind::Eq5 => {
            let ps = primes_or_pmax(o, 499)?;
            let mut max_err = 0f64;
            let mut sums = 0u64;
            r.timed("eq5", || -> Result<()> {
                for &p in &ps {
                    let field = PrimeField::new(p)?;
                    for a in 1..p {
                        max_err = max_err.max((inverse_complete_sum(&field, a)?.value() + 1.0).norm());
                        sums += 1;
                    }
                }
                Ok(())
            })?;
            r.check("every complete inverse sum equals -1 within 1e-8", max_err <= 1e-8);
            r.set("primes", ps.len())?;
            r.set("sums", sums)?;
            r.set("max_error", max_err)?;
        }
        CheckKind::Thm5 => {
            let trials = o.trials.unwrap_or(1000);
            let mut rows = vec![];
            for p in o.primes()? {
                with_field!(p, o.n, |field| {
                    let q = field.order();
                    for s in ks(o, 1..=3) {
                        if s as u64 > q {
                            continue;
                        }
                        let idx: Vec<u64> = (0..q).collect();
                        let (mut violations, mut worst) = (0u64, 0f64);
                        for _ in 0..trials {
                            let e: Vec<_> = idx.choose_multiple(&mut rng, s).map(|&x| field.element(x)).collect();
                            let d: Vec<_> = (0..s).map(|_| field.element(rng.gen_range(1..q))).collect();
                            let rep = ehn_sum(field, &d, &e)?;
                            violations += u64::from(!rep.holds);
                            worst = worst.max(rep.modulus / rep.bound);
                        }
                        r.check(format!("q = {q}, s = {s}: no violations in {trials} trials"), violations == 0);
                        rows.push(json!({ "q": q, "s": s, "trials": trials, "violations": violations, "max_ratio": worst }));
                    }
                });
            }
            r.set("cases", rows)?;
        }
        CheckKind::Thm2 => {
            let trials = o.trials.unwrap_or(20);
            let mut rows = vec![];
            for p in o.primes()? {
                with_field!(p, o.n, |field| {
                    let q = field.order();
                    for k in ks(o, 1..=3) {
                        let (mut agree, mut bound, mut worst) = (true, true, 0f64);
                        for _ in 0..trials {
                            let inst = BilinearInstance::random(p, k, &mut rng)?;
                            let b = curves::bilinear_sum(field, &inst, EXEC)?;
                            let via = curves::histogram_nn(field, &inst, EXEC)?.character_sum(field);
                            agree &= (via - b.value).norm() <= 1e-6 * (q * q) as f64;
                            bound &= b.holds;
                            worst = worst.max(b.modulus / (q as f64));
                        }
                        r.check(format!("q = {q}, k = {k}: sum matches histogram"), agree);
                        r.check(format!("q = {q}, k = {k}: within min(44^(4k) q, (q - k)^2)"), bound);
                        rows.push(json!({ "q": q, "k": k, "trials": trials, "max_modulus_over_q": worst }));
                    }
                });
            }
            r.set("cases", rows)?;
        }
        CheckKind::Prop2 => {
            let trials = o.trials.unwrap_or(20);
            let mut rows = vec![];
            for p in o.primes()? {
                with_field!(p, o.n, |field| {
                    let q = field.order();
                    for k in ks(o, 1..=3) {
                        let (mut pass, mut contained, mut exc_ok) = (true, true, true);
                        let mut most = 0;
                        for _ in 0..trials {
                            let (inst, _, _) = BilinearInstance::random(p, k, &mut rng)?.normalized();
                            let h = curves::histogram_nn(field, &inst, EXEC)?;
                            let rep = curves::prop2_verify(&h);
                            if k == 1 {
                                pass &= rep.exceptions.len() == 1
                                    && rep.exceptions[0].lambda == field.index(field.zero())
                                    && rep.exceptions[0].deviation == q as f64;
                            }
                            pass &= rep.pass;
                            most = most.max(rep.exceptions.len());
                            let exc = curves::exceptional_lambdas(field, &inst, EXEC)?;
                            exc_ok &= exc.pass;
                            contained &= curves::containment_check(field, &rep, &exc).holds;
                        }
                        let cap = curves::singular::exception_cap(k);
                        r.check(format!("q = {q}, k = {k}: at most {cap} exceptions"), pass);
                        r.check(format!("q = {q}, k = {k}: exceptional set within its bounds"), exc_ok);
                        r.check(format!("q = {q}, k = {k}: large deviations only at exceptional lambda"), contained);
                        rows.push(json!({ "q": q, "k": k, "trials": trials, "max_exceptions": most, "cap": cap }));
                    }
                });
            }
            r.set("cases", rows)?;
        }
        CheckKind::Rel9 => {
            let trials = o.trials.unwrap_or(5);
            for p in o.primes()? {
                with_field!(p, o.n, |field| {
                    for k in ks(o, 1..=3) {
                        for _ in 0..trials {
                            let inst = BilinearInstance::random(p, k, &mut rng)?;
                            let rep = curves::relation9_verify(field, &inst, EXEC)?;
                            relation9_findings(r, &rep);
                        }
                    }
                });
            }
        }
        CheckKind::Phi => {
            let p = o.single_p()?;
            let mut out = vec![];
            with_field!(p, o.n, |field| {
                for _ in 0..o.trials.unwrap_or(1) {
                    let inst = BilinearInstance::random(p, o.k.unwrap_or(2), &mut rng)?;
                    let rep = r.timed("phi", || curves::phi_identity_verify(field, &inst, EXEC))?;
                    r.check(format!("q = {}: phi identity over {} terms", rep.q, rep.terms), rep.holds);
                    out.push(json!({ "instance": inst, "report": rep }));
                }
            });
            r.set("cases", out)?;
        }
        CheckKind::Eq16 => {
            let trials = o.trials.unwrap_or(3);
            let mut rows = vec![];
            for p in o.primes()? {
                with_field!(p, o.n, |field| {
                    for k in ks(o, 1..=5) {
                        for _ in 0..trials {
                            let inst = BilinearInstance::random(p, k, &mut rng)?;
                            let (rep, _) = curves::line_effect_check(field, &inst, EXEC)?;
                            line_findings(r, &rep);
                            rows.push(vec![rep.q.to_string(), k.to_string(), rep.max_difference.to_string(), rep.bound.to_string()]);
                        }
                    }
                });
            }
            r.table(Table { header: vec!["q".into(), "k".into(), "difference".into(), "bound".into()], rows });
        }
        CheckKind::Lemma1 => {
            let mut out = vec![];
            for p in o.primes()? {
                let field = PrimeField::new(p)?;
                let rep = r.timed(&format!("lemma1_{p}"), || {
                    lemma1_decomposition_check(&field, o.a.unwrap_or(1), o.at.unwrap_or(0), o.d.unwrap_or(2), EXEC)
                })?;
                lemma1_findings(r, &rep);
                out.push(rep);
            }
            r.set("reports", out)?;
        }
        CheckKind::Fourier => {
            let betas = o.beta.map_or_else(|| vec![0.1, 0.3, 0.5, 0.7], |b| vec![b]);
            let mut rows = vec![];
            for p in primes_or_pmax(o, 499)? {
                for &beta in &betas {
                    let rep = fourier_check(beta, p, 1e-6)?;
                    fourier_checks(r, &rep);
                    rows.push(json!({ "p": p, "beta": beta, "max_error": rep.max_reconstruction_error, "max_scaled_alpha": rep.max_scaled_alpha }));
                }
            }
            r.set("cases", rows)?;
        }
        CheckKind::Chars => {
            let trials = o.trials.unwrap_or(100);
            let mut rows = vec![];
            for p in o.primes()? {
                let field = PrimeField::new(p)?;
                let table = CharacterTable::new(&field)?;
                let orth = orthogonality_check(&table);
                r.check(format!("p = {p}: orthogonality exact"), orth.exact_holds);
                let (mut moment, mut bound) = (true, true);
                for _ in 0..trials {
                    let density = rng.gen_range(0.05..0.95);
                    let set = ResidueSet::from_elements(p, (0..p).filter(|_| rng.gen_bool(density)))?;
                    let rep = cauchy_schwarz_bound_check(&table, &set);
                    moment &= rep.second_moment_holds;
                    bound &= rep.bound_holds;
                }
                r.check(format!("p = {p}: second moment identity on {trials} sets"), moment);
                r.check(format!("p = {p}: Cauchy-Schwarz bound on {trials} sets"), bound);
                rows.push(json!({ "p": p, "orthogonality": orth }));
            }
            r.set("cases", rows)?;
        }
        CheckKind::Lemma3 => {
            let trials = o.trials.unwrap_or(1000);
            for p in o.primes()? {
                let field = PrimeField::new(p)?;
                let table = CharacterTable::new(&field)?;
                let mut violations = 0;
                for _ in 0..trials {
                    let (f, chi) = random_weil_instance(&field, &table, &mut rng);
                    violations += u64::from(!weil_lemma3_check(&field, &table, &f, chi)?.holds);
                }
                r.check(format!("p = {p}: no violations in {trials} polynomials"), violations == 0);
            }
        }
        CheckKind::T2 => {
            let p = o.single_p()?;
            let field = PrimeField::new(p)?;
            let set = o.require_subset()?.realize(&field)?;
            let d = o.require_d()?;
            let parts = match (&o.b_points, &o.c_points) {
                (None, None) => all_partitions(p, o.k.unwrap_or(2)),
                (b, c) => vec![PartitionInstance::new(p, b.clone().unwrap_or_default(), c.clone().unwrap_or_default())?],
            };
            let mut rows = vec![];
            let mut exact = true;
            for part in &parts {
                let rep = t2_character_identity_check(&field, &set, d, part)?;
                exact &= rep.exact_holds && rep.float_holds;
                rows.push(vec![
                    format!("{:?}", part.b).replace(',', ";"),
                    format!("{:?}", part.c).replace(',', ";"),
                    rep.count.to_string(),
                    rep.lhs.to_string(),
                ]);
            }
            r.check(format!("identity exact on {} partitions", parts.len()), exact);
            r.set("partitions", parts.len())?;
            r.table(Table { header: vec!["b".into(), "c".into(), "count".into(), "scaled".into()], rows });
        }
        CheckKind::Pollard => {
            for p in o.primes()? {
                let (mut holds, mut pairs) = (true, 0u64);
                match o.trials {
                    None if p <= 11 => {
                        for m1 in 1u64..1 << p {
                            let a = ResidueSet::from_elements(p, (0..p).filter(|x| m1 >> x & 1 == 1))?;
                            for m2 in 1u64..1 << p {
                                let b = ResidueSet::from_elements(p, (0..p).filter(|x| m2 >> x & 1 == 1))?;
                                holds &= green_ruzsa_verify(&a, &b)?.holds;
                                pairs += 1;
                            }
                        }
                    }
                    t => {
                        for _ in 0..t.unwrap_or(1000) {
                            let mut draw = || {
                                let density = rng.gen_range(0.02..0.98);
                                let s: Vec<u64> = (0..p).filter(|_| rng.gen_bool(density)).collect();
                                ResidueSet::from_elements(p, if s.is_empty() { vec![rng.gen_range(0..p)] } else { s })
                            };
                            let (a, b) = (draw()?, draw()?);
                            holds &= green_ruzsa_verify(&a, &b)?.holds;
                            pairs += 1;
                        }
                    }
                }
                r.check(format!("p = {p}: inequality on {pairs} pairs"), holds);
            }
        }
        CheckKind::Cond34 => {
            let p = o.single_p()?;
            let field = PrimeField::new(p)?;
            let set = o.require_subset()?.realize(&field)?;
            let d = o.require_d()?;
            let alphas: Vec<u64> = o.alpha.map_or_else(|| (2..p).collect(), |a| vec![a]);
            let mut rows = vec![];
            for a in alphas {
                let rep = condition34_check(&field, &set, a, d)?;
                r.check(format!("alpha = {a}: count > |S|(d - 1)"), rep.holds);
                if !rep.floor_holds {
                    r.finding("cond34_floor", format!("alpha = {a}: count below (|S|/2)(|S|/2 - 1)"), json!(rep));
                }
                rows.push(vec![a.to_string(), rep.count.to_string(), rep.required.to_string(), rep.floor.to_string()]);
            }
            r.table(Table { header: vec!["alpha".into(), "count".into(), "required".into(), "floor".into()], rows });
        }
        CheckKind::Thm1 => {
            let beta = o.beta.context("--beta is required")?;
            let (d, k) = (o.require_d()?, o.k.context("--k is required")?);
            let mut out = vec![];
            for p in o.primes()? {
                let rep = theorem1_condition(p, beta, d, k)?;
                let side = if rep.sign < 0 { "fails (main term below error term)" } else { "holds" };
                r.finding("thm1_condition", format!("p = {p}: the counting condition {side}"), json!({ "p": p, "sign": rep.sign }));
                if rep.near_tie {
                    r.finding("thm1_near_tie", format!("p = {p}: the two sides are within a factor 2"), json!(rep));
                }
                out.push(rep);
            }
            let cross = theorem1_crossover(beta, d, k)?;
            let at = cross.first_prime.map_or("beyond the scan range".to_string(), |q| format!("from p = {q}"));
            r.finding("thm1_crossover", format!("the condition first holds {at}"), json!(cross.crossover));
            r.table(Table {
                header: vec!["p".into(), "log_difference".into()],
                rows: cross.samples.iter().map(|(x, v)| vec![x.to_string(), v.to_string()]).collect(),
            });
            r.set("reports", out)?;
            r.set("crossover", cross)?;
        }
        CheckKind::Exceptional => {
            let p = o.single_p()?;
            let mut out = vec![];
            with_field!(p, o.n, |field| {
                for _ in 0..o.trials.unwrap_or(1) {
                    let (inst, _, _) = instance(o, p, &mut rng)?.normalized();
                    let exc = curves::exceptional_lambdas(field, &inst, EXEC)?;
                    let p2 = curves::prop2_verify(&curves::histogram_nn(field, &inst, EXEC)?);
                    let cont = curves::containment_check(field, &p2, &exc);
                    r.check("exceptional set within its bounds", exc.pass);
                    r.check("large deviations only at exceptional lambda", cont.holds);
                    out.push(json!({ "instance": inst, "report": exc, "containment": cont }));
                }
            });
            r.set("cases", out)?;
        }
        CheckKind::Newton => {
            let p = o.single_p()?;
            with_field!(p, o.n, |field| {
                let q = field.order();
                let (inst, _, _) = instance(o, p, &mut rng)?.normalized();
                let k = inst.k() as u64;
                let lambdas: Vec<u64> = o.lambda.map_or_else(|| (1..q.min(256)).collect(), |l| vec![l]);
                let mut degenerate = vec![];
                for &l in &lambdas {
                    let rep = curves::newton_check(field, &inst, field.element(l % q))?;
                    if !(rep.commode && rep.is_square && rep.nu == 2 * k * k - 2 * k) {
                        bail!("unexpected polygon at lambda {l}: {rep:?}");
                    }
                    if !rep.nondegenerate {
                        degenerate.push(l);
                    }
                }
                r.check("square, commode polygon with nu = 2k^2 - 2k", true);
                r.set("instance", &inst)?;
                r.set("lambdas", lambdas.len())?;
                r.set("degenerate", degenerate)?;
            });
        }
    }
    Ok(())
}

fn all_partitions(p: u64, k: usize) -> Vec<PartitionInstance> {
    let mut out = vec![];
    let total = fpcx::combin::binomial(p, k as u64);
    for rank in 0..total {
        let a = fpcx::combin::unrank(p, k, rank);
        for pat in 0..1u32 << k {
            let (b, c): (Vec<u64>, Vec<u64>) = a.iter().enumerate().fold((vec![], vec![]), |(mut b, mut c), (j, &x)| {
                if pat >> j & 1 == 1 {
                    b.push(x)
                } else {
                    c.push(x)
                }
                (b, c)
            });
            out.push(PartitionInstance { b, c });
        }
    }
    out
}
