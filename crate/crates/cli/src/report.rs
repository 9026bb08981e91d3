//! Report types. The structured (JSON) form is the stable surface; the text
//! form is for people.

use std::fmt::Write;

use serde::Serialize;

pub trait Render: Serialize {
    fn text(&self) -> String;
}

#[derive(Debug, Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct TolerancesReport {
    pub psd: f64,
    pub reconstruction: f64,
    pub bsa: f64,
    pub rank: f64,
    pub range: f64,
}

impl From<sepkit::separability::Tolerances> for TolerancesReport {
    fn from(t: sepkit::separability::Tolerances) -> Self {
        Self { psd: t.psd, reconstruction: t.reconstruction, bsa: t.bsa, rank: t.rank, range: t.range }
    }
}

#[derive(Debug, Serialize)]
pub struct Run {
    pub seed: u64,
    pub budget: usize,
    pub restarts: usize,
    pub kmax: usize,
    pub tolerances: TolerancesReport,
    pub wall_time_s: f64,
}

#[derive(Debug, Serialize)]
pub struct Ppt {
    pub ppt: bool,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Serialize)]
pub struct Separability {
    /// `separable`, `entangled`, `ppt-undecided` or `ill-conditioned`.
    pub verdict: String,
    /// Which route decided: `npt`, `low-dim`, `low-rank`, `bsa` or `edge-witness`.
    pub method: String,
    /// Frobenius distance between the certificate and the input, for `separable`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruction_residual: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Bsa {
    pub lambda: f64,
    pub terms: usize,
    pub ppt_constrained: bool,
    pub budget_exhausted: bool,
}

#[derive(Debug, Serialize)]
pub struct Distillability {
    pub verdict: String,
    /// Copies at which the verdict was reached, or the largest tried.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct WitnessReport {
    /// `npt` or `edge`.
    pub kind: String,
    /// `tr(Wρ)` on the input.
    pub value: f64,
    pub sep_floor: f64,
    pub search_restarts: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pseudo_mixture_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative_coefficients: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub command: &'static str,
    pub input: Input,
    pub dims: [usize; 2],
    pub ppt: Ppt,
    pub separability: Separability,
    pub bsa: Bsa,
    pub distillability: Distillability,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    pub run: Run,
}

impl AnalyzeReport {
    /// Some verdict stopped at a search budget rather than a decision.
    pub fn inconclusive(&self) -> bool {
        matches!(self.separability.verdict.as_str(), "ppt-undecided" | "ill-conditioned")
            || self.distillability.verdict == "inconclusive"
    }
}

fn run_line(out: &mut String, r: &Run) {
    let _ = writeln!(
        out,
        "run           seed {}, restarts {}, budget {}, kmax {}, psd tol {:.1e}, {:.3} s",
        r.seed, r.restarts, r.budget, r.kmax, r.tolerances.psd, r.wall_time_s
    );
}

impl Render for AnalyzeReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input         {} (sha256 {})", self.input.path, &self.input.sha256[..16]);
        let _ = writeln!(out, "dims          {}x{}", self.dims[0], self.dims[1]);
        let _ = writeln!(
            out,
            "ppt           {} (min eigenvalue of the partial transpose {:.6e})",
            if self.ppt.ppt { "yes" } else { "no" },
            self.ppt.min_eigenvalue
        );
        let _ = write!(out, "separability  {} via {}", self.separability.verdict, self.separability.method);
        if let Some(r) = self.separability.reconstruction_residual {
            let _ = write!(out, " (residual {r:.2e})");
        }
        out.push('\n');
        let _ = writeln!(
            out,
            "bsa           lambda {:.8} with {} product terms{}",
            self.bsa.lambda,
            self.bsa.terms,
            if self.bsa.budget_exhausted { " (budget exhausted)" } else { "" }
        );
        let d = &self.distillability;
        let _ = write!(out, "distillable   {}", d.verdict);
        if let Some(k) = d.k {
            let _ = write!(out, " at K={k}");
        }
        if let Some(v) = d.value {
            let _ = write!(out, " (min {v:.6e})");
        }
        out.push('\n');
        if let Some(w) = &self.witness {
            let _ = write!(out, "witness       {}: tr(W rho) = {:.6e}, product floor {:.3e}", w.kind, w.value, w.sep_floor);
            if let (Some(t), Some(neg)) = (w.pseudo_mixture_terms, w.negative_coefficients) {
                let _ = write!(out, ", {t} local terms ({neg} negative)");
            }
            out.push('\n');
        }
        run_line(&mut out, &self.run);
        out
    }
}

#[derive(Debug, Serialize)]
pub struct ParticleReport {
    pub command: &'static str,
    pub input: Input,
    /// `fermions` or `bosons`.
    pub particles: &'static str,
    pub n_modes: usize,
    pub slater_rank: usize,
    /// Block values `z_k` (fermions) or Takagi values `d_k` (bosons), descending.
    pub spectrum: Vec<f64>,
    pub reconstruction_residual: f64,
    /// Only defined for four fermionic or two bosonic modes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concurrence: Option<f64>,
    pub tolerance: f64,
    pub wall_time_s: f64,
}

impl Render for ParticleReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input         {} (sha256 {})", self.input.path, &self.input.sha256[..16]);
        let _ = writeln!(out, "particles     two {} in {} modes", self.particles, self.n_modes);
        let _ = writeln!(out, "slater rank   {}", self.slater_rank);
        let spectrum: Vec<String> = self.spectrum.iter().map(|z| format!("{z:.8}")).collect();
        let _ = writeln!(out, "spectrum      [{}]", spectrum.join(", "));
        let _ = writeln!(out, "residual      {:.2e}", self.reconstruction_residual);
        match self.concurrence {
            Some(c) => {
                let _ = writeln!(out, "concurrence   {c:.10}");
            }
            None => {
                let _ = writeln!(out, "concurrence   n/a for {} modes", self.n_modes);
            }
        }
        let _ = writeln!(out, "run           tol {:.1e}, {:.3} s", self.tolerance, self.wall_time_s);
        out
    }
}

#[derive(Debug, Serialize)]
pub struct ScanRowReport {
    pub lambda: f64,
    pub ppt: bool,
    pub min_expectation: f64,
    pub restarts_used: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct ScanReport {
    pub command: &'static str,
    pub d: usize,
    pub k: usize,
    pub rows: Vec<ScanRowReport>,
    #[serde(skip)]
    pub table: String,
}

impl Render for ScanReport {
    fn text(&self) -> String {
        self.table.clone()
    }
}
