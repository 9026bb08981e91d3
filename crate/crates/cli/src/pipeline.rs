use std::path::Path;
use std::time::Instant;

use anyhow::Result;
use sha2::{Digest, Sha256};

use sepkit::distill::{classify_distillability, family_scan, scan_table, DistillabilityVerdict};
use sepkit::fermion::{
    bosonic_concurrence, bosonic_decompose, bosonic_slater_rank, fermionic_concurrence, slater_decompose, slater_rank,
};
use sepkit::io::{self, Particles};
use sepkit::rng;
use sepkit::separability::lowrank::{rank_condition, RankCondition};
use sepkit::separability::{
    best_separable_approximation, classify_low_dim, identity_peeled_approximation, is_ppt, low_rank_separability, BsaOptions, Decomposition,
    LowRankOptions, SeparabilityVerdict, Tolerances,
};
use sepkit::state::{maximally_entangled, random_separable, random_state, sym_antisym_family, werner_2x2, Family};
use sepkit::witness::{canonical_edge_witness, local_decomposition, npt_witness, Witness};
use sepkit::{DensityMatrix, Error};

use crate::report::{
    AnalyzeReport, Bsa, Distillability, Input, ParticleReport, Ppt, Run, ScanReport, ScanRowReport, Separability,
    WitnessReport,
};
use crate::{GenerateArgs, ScanArgs, Settings};

fn input(path: &Path, bytes: &[u8]) -> Input {
    Input { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(bytes)) }
}

fn utf8(bytes: &[u8]) -> Result<&str, Error> {
    std::str::from_utf8(bytes).map_err(|e| Error::Parse { line: 0, column: 0, message: e.to_string() })
}

fn tolerances(s: &Settings) -> Tolerances {
    Tolerances { psd: s.tol, ..Tolerances::default() }
}

fn witness_report(kind: &str, w: &Witness, rho: &DensityMatrix) -> WitnessReport {
    let pm = local_decomposition(w).ok();
    WitnessReport {
        kind: kind.into(),
        value: w.value_on(rho),
        sep_floor: w.sep_floor,
        search_restarts: w.search_restarts,
        pseudo_mixture_terms: pm.as_ref().map(|p| p.len()),
        negative_coefficients: pm.as_ref().map(|p| p.negative_count()),
    }
}

struct Outcome {
    verdict: &'static str,
    method: &'static str,
    certificate: Option<Decomposition>,
    witness: Option<WitnessReport>,
}

/// Separability for PPT inputs outside 2×2 and 2×3: the low-rank route when a
/// rank condition holds, then the separable approximation, then a witness for
/// its remainder.
fn ppt_separability(rho: &DensityMatrix, opts: &BsaOptions) -> Result<(Outcome, Decomposition)> {
    let tol = opts.tol;
    let mut ill = false;
    if rank_condition(rho, &tol) != RankCondition::None {
        let lr = LowRankOptions { seed: opts.seed, tol, ..LowRankOptions::default() };
        match low_rank_separability(rho, &lr) {
            Ok(SeparabilityVerdict::Separable(d)) => {
                let out = Outcome { verdict: "separable", method: "low-rank", certificate: Some(d.clone()), witness: None };
                return Ok((out, d));
            }
            Ok(_) => {}
            Err(Error::NumericallyIllConditioned { .. }) => ill = true,
            Err(e) => return Err(e.into()),
        }
    }
    let mut d = best_separable_approximation(rho, opts);
    if d.lambda < 1.0 - tol.bsa {
        if let Some(peeled) = identity_peeled_approximation(rho, opts).filter(|p| p.lambda > d.lambda) {
            d = peeled;
        }
    }
    if d.lambda >= 1.0 - tol.bsa {
        let out = Outcome { verdict: "separable", method: "bsa", certificate: Some(d.clone()), witness: None };
        return Ok((out, d));
    }
    if let Some(delta) = &d.edge_part {
        if let Ok(w) = canonical_edge_witness(delta, rho, opts.restarts.max(1) * 16, opts.seed) {
            let out = Outcome {
                verdict: "entangled",
                method: "edge-witness",
                certificate: None,
                witness: Some(witness_report("edge", &w, rho)),
            };
            return Ok((out, d));
        }
    }
    let verdict = if ill { "ill-conditioned" } else { "ppt-undecided" };
    Ok((Outcome { verdict, method: "bsa", certificate: None, witness: None }, d))
}

pub fn analyze(path: &Path, bytes: &[u8], s: &Settings) -> Result<AnalyzeReport> {
    let start = Instant::now();
    let rho: DensityMatrix = io::parse_state(utf8(bytes)?)?;
    let (m, n) = rho.dims();
    let tol = tolerances(s);
    let check = is_ppt(&rho, tol.psd);
    let opts = BsaOptions { ppt_constrained: check.ppt, budget: s.budget, restarts: s.restarts, seed: s.seed, tol };

    let (outcome, bsa) = if !check.ppt {
        let w = npt_witness(&rho, s.restarts, s.seed)?;
        let out = Outcome {
            verdict: "entangled",
            method: "npt",
            certificate: None,
            witness: Some(witness_report("npt", &w, &rho)),
        };
        (out, best_separable_approximation(&rho, &opts))
    } else if matches!((m, n), (2, 2) | (2, 3) | (3, 2)) {
        match classify_low_dim(&rho, &opts)? {
            SeparabilityVerdict::Separable(d) => {
                (Outcome { verdict: "separable", method: "low-dim", certificate: Some(d.clone()), witness: None }, d)
            }
            SeparabilityVerdict::Entangled(_) => unreachable!("the input is PPT"),
            SeparabilityVerdict::PptUndecided => (
                Outcome { verdict: "ppt-undecided", method: "low-dim", certificate: None, witness: None },
                best_separable_approximation(&rho, &opts),
            ),
        }
    } else {
        ppt_separability(&rho, &opts)?
    };

    let residual = outcome.certificate.as_ref().map(|d| (&d.reconstruct() - rho.matrix()).frobenius_norm());
    let distillability = match classify_distillability(&rho, s.kmax, s.restarts, s.seed)? {
        DistillabilityVerdict::Distillable { k, value, .. } => {
            Distillability { verdict: "distillable".into(), k: Some(k), value: Some(value) }
        }
        DistillabilityVerdict::UndistillablePpt => Distillability { verdict: "undistillable-ppt".into(), k: None, value: None },
        DistillabilityVerdict::Inconclusive { kmax, best_value } => {
            Distillability { verdict: "inconclusive".into(), k: Some(kmax), value: Some(best_value) }
        }
    };

    Ok(AnalyzeReport {
        command: "analyze",
        input: input(path, bytes),
        dims: [m, n],
        ppt: Ppt { ppt: check.ppt, min_eigenvalue: check.min_eigenvalue },
        separability: Separability {
            verdict: outcome.verdict.into(),
            method: outcome.method.into(),
            reconstruction_residual: residual,
        },
        bsa: Bsa {
            lambda: bsa.lambda,
            terms: bsa.term_count(),
            ppt_constrained: opts.ppt_constrained,
            budget_exhausted: bsa.budget_exhausted,
        },
        distillability,
        witness: outcome.witness,
        run: Run {
            seed: s.seed,
            budget: s.budget,
            restarts: s.restarts,
            kmax: s.kmax,
            tolerances: tol.into(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}

pub fn fermion(path: &Path, bytes: &[u8], s: &Settings) -> Result<ParticleReport> {
    let start = Instant::now();
    let parsed: Particles = io::parse_particles(utf8(bytes)?)?;
    let (particles, n_modes, slater, spectrum, residual, concurrence) = match &parsed {
        Particles::Fermions(f) => {
            let form = slater_decompose(f)?;
            let residual = (&form.reconstruct() - f.w()).frobenius_norm();
            let c = if f.n_modes() == 4 { Some(fermionic_concurrence(f)?) } else { None };
            ("fermions", f.n_modes(), slater_rank(f, s.tol)?, form.z, residual, c)
        }
        Particles::Bosons(b) => {
            let form = bosonic_decompose(b)?;
            let residual = (&form.reconstruct() - b.v()).frobenius_norm();
            let c = if b.n_modes() == 2 { Some(bosonic_concurrence(b)?) } else { None };
            ("bosons", b.n_modes(), bosonic_slater_rank(b, s.tol)?, form.d, residual, c)
        }
    };
    Ok(ParticleReport {
        command: "fermion",
        input: input(path, bytes),
        particles,
        n_modes,
        slater_rank: slater,
        spectrum,
        reconstruction_residual: residual,
        concurrence,
        tolerance: s.tol,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn check_dim(name: &str, v: usize) -> Result<(), Error> {
    if v < 2 {
        return Err(Error::Shape(format!("{name} must be at least 2")));
    }
    Ok(())
}

/// The state file text for the requested family.
pub fn generate(args: &GenerateArgs, s: &Settings) -> Result<String> {
    let family: Family = args.family.parse()?;
    let mut r = rng::seeded(s.seed);
    let rho: DensityMatrix = match family {
        Family::MaximallyEntangled => {
            check_dim("d", args.d)?;
            DensityMatrix::from_pure(&maximally_entangled(args.d))
        }
        Family::Werner2x2 => {
            if !(0.0..=1.0).contains(&args.p) {
                return Err(Error::NotAState(format!("p = {} is outside [0, 1]", args.p)).into());
            }
            werner_2x2(args.p)
        }
        Family::SymAntisym => {
            check_dim("d", args.d)?;
            if !(0.0..=1.0).contains(&args.lambda) {
                return Err(Error::NotAState(format!("lambda = {} is outside [0, 1]", args.lambda)).into());
            }
            sym_antisym_family(args.d, args.lambda)
        }
        Family::Random => {
            check_dim("m", args.m)?;
            check_dim("n", args.n)?;
            random_state(&mut r, args.m, args.n, args.rank)
        }
        Family::RandomSeparable => {
            check_dim("m", args.m)?;
            check_dim("n", args.n)?;
            random_separable(&mut r, args.m, args.n, args.rank.max(1)).0
        }
    };
    Ok(io::state_to_string(&rho))
}

pub fn scan(args: &ScanArgs, s: &Settings) -> Result<ScanReport> {
    let points = args.points.max(1);
    let grid: Vec<f64> = (0..points)
        .map(|i| if points == 1 { args.from } else { args.from + (args.to - args.from) * i as f64 / (points - 1) as f64 })
        .collect();
    let rows = family_scan(args.d, &grid, args.k, s.restarts, s.seed)?;
    let table = scan_table(&rows);
    Ok(ScanReport {
        command: "scan",
        d: args.d,
        k: args.k,
        rows: rows
            .into_iter()
            .map(|r| ScanRowReport {
                lambda: r.lambda,
                ppt: r.ppt,
                min_expectation: r.min_expectation,
                restarts_used: r.restarts_used,
                seed: r.seed,
            })
            .collect(),
        table,
    })
}
