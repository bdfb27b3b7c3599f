//! Acceptance suite: one line per criterion.
//!
//! A criterion listed in `KNOWN_FAILURES` is still evaluated and printed as
//! FAIL when it fails; it only stops that failure from failing the process.

use std::error::Error as StdError;
use std::time::{Duration, Instant};

use fpcx::combin::{binomial, unrank};
use fpcx::complexity::additive::{condition34_check, green_ruzsa_verify};
use fpcx::complexity::{
    complexity_exact, t2_character_identity_check, theorem1_condition, theorem1_crossover, theorem4_sweep, Family, FamilyKind,
    PartitionInstance,
};
use fpcx::curves::singular::exception_cap;
use fpcx::curves::{
    bilinear_sum, containment_check, exceptional_lambdas, histogram_nn, phi_identity_verify, prop2_verify, relation9_verify,
    BilinearInstance,
};
use fpcx::field::{is_prime, ExtField, FiniteField, PrimeField};
use fpcx::par::Exec;
use fpcx::subsets::ResidueSet;
use fpcx::sums::additive::{ehn_sum, inverse_complete_sum, lemma1_decomposition_check};
use fpcx::sums::characters::{cauchy_schwarz_bound_check, orthogonality_check, random_weil_instance, weil_lemma3_check, CharacterTable};
use fpcx::sums::fourier::fourier_check;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

type Res<T> = Result<T, Box<dyn StdError>>;

/// The literal decomposition in the proof of the single-frequency estimate
/// counts each d-subset once on the left but d times on the right.
const KNOWN_FAILURES: &[u32] = &[7];

const EXEC: Exec = Exec::Parallel;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Res<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn primes_upto(m: u64) -> Vec<u64> {
    (3..=m).filter(|&x| is_prime(x)).collect()
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn c01_inverse_sums() -> Res<Outcome> {
    let start = Instant::now();
    let mut worst = 0f64;
    let mut sums = 0;
    for p in primes_upto(499) {
        let f = PrimeField::new(p)?;
        for a in 1..p {
            worst = worst.max((inverse_complete_sum(&f, a)?.value() + 1.0).norm());
            sums += 1;
        }
    }
    let t = start.elapsed();
    outcome(worst <= 1e-8 && t < Duration::from_secs(5), format!("{sums} sums, max |S + 1| = {worst:.1e}, {t:.2?}"))
}

fn ehn_trials<F: FiniteField>(f: &F, s: usize, trials: usize, rng: &mut ChaCha8Rng) -> Res<(u64, f64)> {
    let q = f.order();
    let idx: Vec<u64> = (0..q).collect();
    let (mut bad, mut worst) = (0, 0f64);
    for _ in 0..trials {
        let e: Vec<_> = idx.choose_multiple(rng, s).map(|&x| f.element(x)).collect();
        let d: Vec<_> = (0..s).map(|_| f.element(rng.gen_range(1..q))).collect();
        let r = ehn_sum(f, &d, &e)?;
        bad += u64::from(!r.holds);
        worst = worst.max(r.modulus / r.bound);
    }
    Ok((bad, worst))
}

fn c02_ehn_bound() -> Res<Outcome> {
    let mut rng = rng(2);
    let (mut bad, mut worst, mut fields) = (0, 0f64, 0);
    for s in 1..=3 {
        for p in primes_upto(499) {
            let (b, w) = ehn_trials(&PrimeField::new(p)?, s, 1000, &mut rng)?;
            bad += b;
            worst = worst.max(w);
            fields += 1;
        }
        for p in primes_upto(37) {
            let (b, w) = ehn_trials(&ExtField::new(p, 2)?, s, 1000, &mut rng)?;
            bad += b;
            worst = worst.max(w);
            fields += 1;
        }
    }
    outcome(bad == 0, format!("{fields} (field, s) cases x 1000, {bad} violations, max |S|/bound = {worst:.3}"))
}

fn c03_bilinear() -> Res<Outcome> {
    let mut rng = rng(3);
    let (mut agree, mut bound, mut worst) = (true, true, 0f64);
    for p in [101u64, 499] {
        let f = PrimeField::new(p)?;
        for k in 1..=3 {
            for _ in 0..20 {
                let inst = BilinearInstance::random(p, k, &mut rng)?;
                let b = bilinear_sum(&f, &inst, EXEC)?;
                let err = (histogram_nn(&f, &inst, EXEC)?.character_sum(&f) - b.value).norm();
                agree &= err <= 1e-6 * (p * p) as f64;
                bound &= b.holds;
                worst = worst.max(b.modulus / p as f64);
            }
        }
    }
    let f7 = PrimeField::new(7)?;
    let v = bilinear_sum(&f7, &BilinearInstance::new(7, vec![0], vec![0], vec![1])?, Exec::Sequential)?.value;
    let exact = (v.re + 6.0).abs() <= 1e-9 && v.im.abs() <= 1e-9;
    outcome(
        agree && bound && exact,
        format!("histogram oracle {agree}, bounds {bound}, max |S|/p = {worst:.2}, p=7 instance = {:.3}{:+.1e}i", v.re, v.im),
    )
}

fn c04_prop2() -> Res<Outcome> {
    let mut rng = rng(4);
    let (mut pass, mut most, mut uncovered, mut cases) = (true, 0usize, 0usize, 0);
    for p in [101u64, 151] {
        let f = PrimeField::new(p)?;
        for k in 1..=3 {
            for _ in 0..20 {
                let (inst, _, _) = BilinearInstance::random(p, k, &mut rng)?.normalized();
                let r = prop2_verify(&histogram_nn(&f, &inst, EXEC)?);
                pass &= r.pass && r.nu == 2 * (k * k) as u64 && r.exceptions.len() as u64 <= exception_cap(k);
                most = most.max(r.exceptions.len());
                let exc = exceptional_lambdas(&f, &inst, EXEC)?;
                uncovered += containment_check(&f, &r, &exc).uncovered.len();
                cases += 1;
            }
        }
    }
    for p in primes_upto(31).into_iter().filter(|&p| p >= 11) {
        let f = ExtField::new(p, 2)?;
        let (inst, _, _) = BilinearInstance::random(p, 2, &mut rng)?.normalized();
        let r = prop2_verify(&histogram_nn(&f, &inst, EXEC)?);
        pass &= r.pass && r.exceptions.len() as u64 <= exception_cap(2);
        most = most.max(r.exceptions.len());
        cases += 1;
    }
    let mut k1 = true;
    for p in [101u64, 151] {
        let f = PrimeField::new(p)?;
        let r = prop2_verify(&histogram_nn(&f, &BilinearInstance::new(p, vec![0], vec![0], vec![1])?, EXEC)?);
        k1 &= r.exceptions.len() == 1 && r.exceptions[0].lambda == 0 && r.exceptions[0].deviation == p as f64 && r.threshold < p as f64;
    }
    outcome(
        pass && k1,
        format!("{cases} instances, max exceptions {most}, k=1 case {k1}, large deviations outside the exceptional set: {uncovered}"),
    )
}

/// Returns whether the measured difference matches `2(q - k + 1) - 1`, and
/// whether the stated constant agrees with it.
fn relation9_case<F: FiniteField>(f: &F, p: u64, k: usize, rng: &mut ChaCha8Rng) -> Res<(bool, bool)> {
    let r = relation9_verify(f, &BilinearInstance::random(p, k, rng)?, EXEC)?;
    let formula = 2 * (r.q - k as u64 + 1) - 1;
    Ok(((r.diff.re - r.expected_diff as f64).abs() < 1e-6 && r.expected_diff == formula, r.stated_constant == formula))
}

fn c05_relation9() -> Res<Outcome> {
    let mut rng = rng(5);
    let (mut ok, mut cases, mut differs) = (true, 0, 0);
    for k in 1..=3 {
        for p in [5u64, 7, 11, 31, 101] {
            let (m, same) = relation9_case(&PrimeField::new(p)?, p, k, &mut rng)?;
            ok &= m;
            differs += usize::from(!same);
            cases += 1;
        }
        for p in [5u64, 7] {
            let (m, same) = relation9_case(&ExtField::new(p, 2)?, p, k, &mut rng)?;
            ok &= m;
            differs += usize::from(!same);
            cases += 1;
        }
    }
    let f7 = PrimeField::new(7)?;
    let r = relation9_verify(&f7, &BilinearInstance::new(7, vec![0], vec![0], vec![1])?, EXEC)?;
    let k1 = (r.diff.re - 13.0).abs() < 1e-9 && r.stated_constant == 13;
    outcome(ok && k1, format!("{cases} instances, p=7 k=1 diff = {:.0}, stated constant differs on {differs} (all k >= 2)", r.diff.re))
}

fn c06_phi() -> Res<Outcome> {
    let mut rng = rng(6);
    let start = Instant::now();
    let mut ok = true;
    let mut terms = vec![];
    for p in [5u64, 7] {
        let f = PrimeField::new(p)?;
        let r = phi_identity_verify(&f, &BilinearInstance::random(p, 2, &mut rng)?, EXEC)?;
        ok &= r.holds && r.error <= 1e-6 * (p * p * p) as f64;
        terms.push(r.terms);
    }
    let t = start.elapsed();
    outcome(ok && t < Duration::from_secs(10), format!("terms {terms:?}, {t:.2?}"))
}

fn c07_lemma1() -> Res<Outcome> {
    let (mut literal, mut counted) = (true, true);
    let mut ratios = vec![];
    let mut worst_literal = 0f64;
    for (p, d) in [(7u64, 2usize), (11, 2), (11, 3), (31, 2)] {
        let f = PrimeField::new(p)?;
        let r = lemma1_decomposition_check(&f, 1, 0, d, EXEC)?;
        literal &= r.literal_holds;
        counted &= r.counted_holds;
        worst_literal = worst_literal.max(r.literal_residual);
        ratios.push(format!("({p},{d}) {:.3}", r.ratio_binomial_main_term));
    }
    outcome(
        literal,
        format!(
            "identity as displayed: {literal} (max residual {worst_literal:.1}); with the left side multiplied by d: {counted}; |S + C(p-1,d-1)|/p^(d-3/2): {}",
            ratios.join(", ")
        ),
    )
}

fn c08_fourier() -> Res<Outcome> {
    let (mut ok, mut worst, mut cases) = (true, 0f64, 0);
    for p in primes_upto(499) {
        for beta in [0.1, 0.3, 0.5, 0.7] {
            let r = fourier_check(beta, p, 1e-6)?;
            ok &= r.reconstruction_holds && r.alpha0_exact && r.coefficient_bound_holds;
            worst = worst.max(r.max_reconstruction_error);
            cases += 1;
        }
    }
    outcome(ok, format!("{cases} (p, beta) pairs, max reconstruction error {worst:.1e}"))
}

fn c09_characters() -> Res<Outcome> {
    let mut rng = rng(9);
    let mut orth = true;
    for p in primes_upto(101) {
        orth &= orthogonality_check(&CharacterTable::new(&PrimeField::new(p)?)?).exact_holds;
    }
    let (mut moment, mut cs, mut weil) = (true, true, 0u64);
    for p in [31u64, 101] {
        let f = PrimeField::new(p)?;
        let table = CharacterTable::new(&f)?;
        for _ in 0..100 {
            let density = rng.gen_range(0.05..0.95);
            let set = ResidueSet::from_elements(p, (0..p).filter(|_| rng.gen_bool(density)))?;
            let r = cauchy_schwarz_bound_check(&table, &set);
            moment &= r.second_moment_holds;
            cs &= r.bound_holds;
        }
        for _ in 0..500 {
            let (poly, chi) = random_weil_instance(&f, &table, &mut rng);
            weil += u64::from(!weil_lemma3_check(&f, &table, &poly, chi)?.holds);
        }
    }
    outcome(
        orth && moment && cs && weil == 0,
        format!("orthogonality {orth}, second moment {moment}, Cauchy-Schwarz {cs}, Weil violations {weil}/1000"),
    )
}

fn all_subsets(p: u64) -> impl Iterator<Item = ResidueSet> {
    (1u64..(1 << p) - 1).map(move |m| ResidueSet::from_elements(p, (0..p).filter(|x| m >> x & 1 == 1)).unwrap())
}

fn c10_complexity() -> Res<Outcome> {
    let f3 = PrimeField::new(3)?;
    let p1 = |d| FamilyKind::new(Family::P1, d);
    let base = complexity_exact(&p1(1)?, &f3, &ResidueSet::from_elements(3, [1])?, 8, EXEC)?;
    let explicit = base.k == 2 && base.failure_confirmed;

    let (mut lower, mut sets) = (true, 0);
    for p in [3u64, 5, 7, 11, 13] {
        let f = PrimeField::new(p)?;
        for d in 1..=2usize {
            if d + 1 > p as usize {
                continue;
            }
            for s in all_subsets(p) {
                let r = complexity_exact(&p1(d)?, &f, &s, d + 1, EXEC)?;
                lower &= r.k > d;
                sets += 1;
            }
        }
    }

    let mut rng = rng(10);
    let (mut nested, mut clamp, mut joint) = (true, true, 0);
    for p in [5u64, 7, 11] {
        let f = PrimeField::new(p)?;
        for d in 1..=2usize {
            let mut pool: Vec<ResidueSet> = all_subsets(p).collect();
            pool.shuffle(&mut rng);
            for s in pool.iter().take(if p <= 7 { usize::MAX } else { 60 }) {
                let ks: Vec<_> = [Family::P1, Family::P2, Family::P3]
                    .into_iter()
                    .map(|fam| complexity_exact(&FamilyKind::new(fam, d)?, &f, s, p as usize, EXEC))
                    .collect::<Result<_, _>>()?;
                nested &= ks[0].k >= ks[1].k && ks[1].k >= ks[2].k;
                clamp &= ks[2].clamp_holds;
                joint += 1;
            }
        }
    }
    outcome(
        explicit && lower && nested && clamp,
        format!(
            "K1({{1}}, 3, 1) = {}, K1 >= d+1 on {sets} sets: {lower}, nesting on {joint} joint runs: {nested}, K3 clamp: {clamp}",
            base.k
        ),
    )
}

fn c11_construction() -> Res<Outcome> {
    let set_spec = |p| ResidueSet::from_elements(p, 1..=7);
    let mut ok = true;
    let mut parts = vec![];
    for p in [17u64, 19, 23, 29, 31] {
        let f = PrimeField::new(p)?;
        let start = Instant::now();
        let r = theorem4_sweep(&f, &set_spec(p)?, 2, EXEC)?;
        let t = start.elapsed();
        let expected = binomial(p, 4) as u64 * 16;
        ok &= r.all_verified && r.successes == r.partitions && r.partitions == expected && t < Duration::from_secs(60);
        parts.push(format!("p={p}: {}/{} in {t:.1?}", r.successes, r.partitions));
    }
    outcome(ok, parts.join(", "))
}

fn c12_t2() -> Res<Outcome> {
    let mut ok = true;
    let mut count = 0;
    for (p, sets) in [(7u64, vec![vec![1u64, 2, 3], vec![0, 3, 5, 6]]), (13, vec![vec![1, 2, 3, 4, 5], vec![2, 3, 5, 7, 11, 12]])] {
        let f = PrimeField::new(p)?;
        for elems in sets {
            let set = ResidueSet::from_elements(p, elems)?;
            for rank in 0..binomial(p, 2) {
                let pts = unrank(p, 2, rank);
                for pat in 0..4u32 {
                    let (b, c) = if pat & 1 == 1 { (vec![pts[0]], vec![]) } else { (vec![], vec![pts[0]]) };
                    let (mut b, mut c) = (b, c);
                    if pat & 2 == 2 {
                        b.push(pts[1])
                    } else {
                        c.push(pts[1])
                    }
                    let r = t2_character_identity_check(&f, &set, 2, &PartitionInstance::new(p, b, c)?)?;
                    ok &= r.exact_holds && r.float_holds;
                    count += 1;
                }
            }
        }
    }
    outcome(ok, format!("{count} partitions at p = 7, 13"))
}

fn c13_pollard() -> Res<Outcome> {
    let mut ok = true;
    let mut pairs = 0u64;
    for p in [3u64, 5, 7, 11] {
        let sets: Vec<ResidueSet> =
            (1u64..1 << p).map(|m| ResidueSet::from_elements(p, (0..p).filter(|x| m >> x & 1 == 1))).collect::<Result<_, _>>()?;
        for a in &sets {
            for b in &sets {
                ok &= green_ruzsa_verify(a, b)?.holds;
                pairs += 1;
            }
        }
    }
    let mut rng = rng(13);
    for _ in 0..1000 {
        let mut draw = || {
            let density = rng.gen_range(0.02..0.98);
            let s: Vec<u64> = (0..101).filter(|_| rng.gen_bool(density)).collect();
            ResidueSet::from_elements(101, if s.is_empty() { vec![0] } else { s })
        };
        let (a, b) = (draw()?, draw()?);
        ok &= green_ruzsa_verify(&a, &b)?.holds;
        pairs += 1;
    }
    let s = ResidueSet::from_elements(7, [1, 2, 3])?;
    let rows = green_ruzsa_verify(&s, &s)?.rows;
    let worked = rows.len() == 3 && (rows[0].lhs, rows[0].rhs) == (5, 4) && (rows[1].lhs, rows[1].rhs) == (8, 6);
    // the sumset-count condition rides on the same representation counts
    let f = PrimeField::new(101)?;
    let c34 = condition34_check(&f, &ResidueSet::from_elements(101, 1..=20)?, 3, 2)?.holds;
    outcome(ok && worked && c34, format!("{pairs} pairs, worked example (t=1: 5 >= 4, t=2: 8 >= 6): {worked}"))
}

fn c14_condition() -> Res<Outcome> {
    let r = theorem1_condition(101, 0.5, 2, 1)?;
    let cross = theorem1_crossover(0.5, 2, 1)?;
    let at = cross.first_prime.map_or_else(|| "none in range".to_string(), |q| q.to_string());
    outcome(r.sign < 0, format!("sign at p=101: {}, first prime where it holds: {at}", r.sign))
}

fn c15_performance() -> Res<Outcome> {
    let p = 9973;
    let f = PrimeField::new(p)?;
    let inst = BilinearInstance::random(p, 3, &mut rng(15))?;
    let run = |threads: usize| -> Res<(Vec<u64>, Duration)> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        let start = Instant::now();
        let h = pool.install(|| histogram_nn(&f, &inst, Exec::Parallel))?;
        Ok((h.counts, start.elapsed()))
    };
    let (four, t4) = run(4)?;
    let (one, t1) = run(1)?;
    let digest = |v: &[u64]| hex::encode(Sha256::digest(v.iter().flat_map(|x| x.to_le_bytes()).collect::<Vec<u8>>()));
    let mass = four.iter().sum::<u64>() == (p - 3) * (p - 3);
    let same = digest(&four) == digest(&one);
    outcome(
        mass && same && t4 <= Duration::from_secs(60),
        format!("4 workers {t4:.2?}, 1 worker {t1:.2?}, mass exact {mass}, digest {}.. identical {same}", &digest(&four)[..16]),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Res<Outcome>); 15] = [
        (1, "complete inverse sums", c01_inverse_sums),
        (2, "sums over shifted inverses", c02_ehn_bound),
        (3, "bilinear sum vs histogram", c03_bilinear),
        (4, "few large point-count deviations", c04_prop2),
        (5, "full vs torus variety sum", c05_relation9),
        (6, "phi identity", c06_phi),
        (7, "single-frequency decomposition", c07_lemma1),
        (8, "interval Fourier expansion", c08_fourier),
        (9, "character sums", c09_characters),
        (10, "family complexity", c10_complexity),
        (11, "constructive witnesses", c11_construction),
        (12, "pattern-count character identity", c12_t2),
        (13, "sumset inequality", c13_pollard),
        (14, "counting condition sign", c14_condition),
        (15, "histogram throughput and determinism", c15_performance),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = match (pass, KNOWN_FAILURES.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("[{tag}] {id:>2} {name}: {detail} [{:.1?}]", start.elapsed());
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
