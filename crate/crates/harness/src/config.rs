//! Experiment configuration, parameter grids and presets.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use vbm_core::gen::{Crossing, HnParams, Lr14Params, Strategy, VbmParams, DEFAULT_EXPANDER_DEGREE};
use vbm_core::sdp::SolverOptions;

/// Which model and rounding a trial runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Block model with expanders and random boundary edges; certificate plus
    /// rank-one rounding.
    ExactRecovery,
    /// Random boundary edges only, adversarial interiors; cluster rounding.
    LambdaZero,
    /// Expander on `S\T`, adversarial boundary edges; cluster rounding.
    PZero,
    /// Two-expander planted model; ball rounding.
    Lr14,
    /// Edge-cut versus vertex-cut comparison on the `H_n` family.
    HnSeparation,
}

impl Regime {
    pub const ALL: [Regime; 5] =
        [Regime::ExactRecovery, Regime::LambdaZero, Regime::PZero, Regime::Lr14, Regime::HnSeparation];

    pub fn name(self) -> &'static str {
        match self {
            Regime::ExactRecovery => "exact-recovery",
            Regime::LambdaZero => "lambda-zero",
            Regime::PZero => "p-zero",
            Regime::Lr14 => "lr14",
            Regime::HnSeparation => "hn-separation",
        }
    }

    pub fn parse(s: &str) -> Result<Regime> {
        Regime::ALL.into_iter().find(|r| r.name() == s).with_context(|| format!("unknown regime {s:?}"))
    }
}

/// Parameter axes. Cells are the Cartesian product in the order
/// `n, eps, p, lambda, q, alpha` (last axis fastest). Axes a regime does not
/// use still multiply the cell count, so keep them at one value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Grid {
    pub n: Vec<usize>,
    /// `ε₁ = ε₂`.
    pub eps: Vec<f64>,
    /// `p₁` (and `p₂` in the exact-recovery regime).
    pub p: Vec<f64>,
    /// Expander spectral-gap target.
    pub lambda: Vec<f64>,
    /// Adversary edge probability for `random-within-sides`.
    pub q: Vec<f64>,
    /// `H_n` degree parameter.
    pub alpha: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { n: vec![200], eps: vec![0.05], p: vec![0.5], lambda: vec![0.3], q: vec![0.05], alpha: vec![0.25] }
    }
}

/// One point of the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Cell {
    pub index: usize,
    pub regime: Regime,
    pub n: usize,
    pub eps: f64,
    pub p: f64,
    pub lambda: f64,
    pub q: f64,
    pub alpha: f64,
    /// Maximum `F`-degree in the exact-recovery regime.
    pub c: usize,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub regime: Regime,
    #[serde(default)]
    pub grid: Grid,
    pub trials: usize,
    #[serde(default)]
    pub seed_base: u64,
    /// Relative paths resolve against `$VBM_OUT` when it is set.
    pub out_dir: PathBuf,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Constant in the exact-recovery requirement `p·n ≥ c₁·ln n`.
    #[serde(default = "default_c1")]
    pub c1: f64,
    #[serde(default = "default_c")]
    pub c: usize,
    #[serde(default = "default_r")]
    pub r: f64,
}

fn default_c1() -> f64 {
    1.0
}

fn default_c() -> usize {
    3
}

fn default_r() -> f64 {
    2.0
}

pub const OUT_ENV: &str = "VBM_OUT";

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).context("parsing experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    /// Output directory after applying `$VBM_OUT`.
    pub fn resolved_out_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_ENV) {
            Some(root) if self.out_dir.is_relative() => PathBuf::from(root).join(&self.out_dir),
            _ => self.out_dir.clone(),
        }
    }

    /// Every cell of the grid, in index order.
    pub fn cells(&self) -> Vec<Cell> {
        let g = &self.grid;
        let mut out = Vec::new();
        for &n in &g.n {
            for &eps in &g.eps {
                for &p in &g.p {
                    for &lambda in &g.lambda {
                        for &q in &g.q {
                            for &alpha in &g.alpha {
                                out.push(Cell {
                                    index: out.len(),
                                    regime: self.regime,
                                    n,
                                    eps,
                                    p,
                                    lambda,
                                    q,
                                    alpha,
                                    c: self.c,
                                    r: self.r,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Checks every cell against its regime. An empty axis is allowed and
    /// yields no cells.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be positive");
        }
        for cell in self.cells() {
            cell.validate(self.c1).with_context(|| format!("grid cell {}", cell.index))?;
        }
        Ok(())
    }
}

/// Adversary used by the two regimes with arbitrary interiors: random
/// same-side edges plus every `T × T′` pair.
pub fn arbitrary_adversary(q: f64) -> Vec<Strategy> {
    vec![Strategy::RandomWithinSides { q }, Strategy::CliqueTTprime]
}

/// Generator input for a cell.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelInput {
    Vbm(VbmParams),
    Lr14(Lr14Params),
    Hn(HnParams),
}

impl Cell {
    pub fn validate(&self, c1: f64) -> Result<()> {
        let n = self.n as f64;
        match self.model(0) {
            ModelInput::Vbm(p) => p.validate()?,
            ModelInput::Lr14(p) => {
                if p.n < 4 || p.n % 2 != 0 || p.eps * n < 1.0 - 1e-9 || p.eps >= 0.5 {
                    bail!("lr14 needs even n ≥ 4 and eps in [1/n, 1/2)");
                }
            }
            ModelInput::Hn(p) => {
                if p.n < 8 || p.n % 4 != 0 || p.eps >= 0.5 || !(p.alpha > 0.0 && p.alpha < 0.5) {
                    bail!("hn needs n divisible by 4, eps < 1/2 and alpha in (0, 1/2)");
                }
            }
        }
        if self.regime == Regime::ExactRecovery && self.p * n < c1 * n.ln() {
            bail!("p·n = {:.2} is below c1·ln n = {:.2}", self.p * n, c1 * n.ln());
        }
        Ok(())
    }

    /// Generator parameters for the trial seeded with `seed`.
    pub fn model(&self, seed: u64) -> ModelInput {
        let vbm = |p1, p2, c, lambda1, lambda2, adversary| VbmParams {
            n: self.n,
            eps1: self.eps,
            eps2: self.eps,
            p1,
            p2,
            c,
            r: self.r,
            lambda1,
            lambda2,
            expander_degree: DEFAULT_EXPANDER_DEGREE,
            adversary,
            seed,
        };
        match self.regime {
            Regime::ExactRecovery => ModelInput::Vbm(vbm(
                self.p,
                self.p,
                self.c,
                self.lambda,
                self.lambda,
                vec![Strategy::RandomWithinSides { q: self.q }],
            )),
            Regime::LambdaZero => ModelInput::Vbm(vbm(self.p, 0.0, 0, 0.0, 0.0, arbitrary_adversary(self.q))),
            Regime::PZero => ModelInput::Vbm(vbm(0.0, 0.0, 0, self.lambda, 0.0, arbitrary_adversary(self.q))),
            Regime::Lr14 => ModelInput::Lr14(Lr14Params {
                n: self.n,
                eps: self.eps,
                lambda: self.lambda,
                expander_degree: DEFAULT_EXPANDER_DEGREE,
                r: self.r,
                crossing: Crossing::Matching,
                adversary: Vec::new(),
                seed,
            }),
            Regime::HnSeparation => ModelInput::Hn(HnParams {
                n: self.n,
                eps: self.eps,
                alpha: self.alpha,
                expander_degree: 6,
                seed,
                first_half: Vec::new(),
            }),
        }
    }
}

/// Desk-scale presets, one per regime.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let regime = Regime::parse(name)?;
    let mut solver = SolverOptions::default();
    let (grid, trials) = match regime {
        Regime::ExactRecovery => (Grid { n: vec![100], ..Grid::default() }, 20),
        Regime::LambdaZero => {
            solver.tol_feas = 1e-5;
            (
                Grid {
                    n: vec![400],
                    eps: vec![0.03],
                    p: vec![1.0],
                    lambda: vec![0.0],
                    q: vec![0.1],
                    ..Grid::default()
                },
                20,
            )
        }
        Regime::PZero => {
            solver.tol_feas = 1e-5;
            (
                Grid {
                    n: vec![400],
                    eps: vec![0.03],
                    p: vec![0.0],
                    lambda: vec![0.3],
                    q: vec![0.1],
                    ..Grid::default()
                },
                20,
            )
        }
        Regime::Lr14 => {
            solver.tol_feas = 1e-5;
            (Grid { n: vec![300], eps: vec![0.02], lambda: vec![0.3], ..Grid::default() }, 20)
        }
        Regime::HnSeparation => {
            solver.tol_feas = 1e-4;
            (Grid { n: vec![600], eps: vec![0.1], alpha: vec![0.25], ..Grid::default() }, 10)
        }
    };
    Ok(ExperimentConfig {
        regime,
        grid,
        trials,
        seed_base: 1,
        out_dir: PathBuf::from(regime.name()),
        solver,
        c1: default_c1(),
        c: default_c(),
        r: default_r(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for r in Regime::ALL {
            let cfg = preset(r.name()).unwrap();
            cfg.validate().unwrap();
            assert_eq!(cfg.cells().len(), 1);
        }
    }

    #[test]
    fn grid_order_is_last_axis_fastest() {
        let mut cfg = preset("exact-recovery").unwrap();
        cfg.grid.n = vec![100, 200];
        cfg.grid.p = vec![0.5, 0.8];
        let cells = cfg.cells();
        let got: Vec<(usize, f64)> = cells.iter().map(|c| (c.n, c.p)).collect();
        assert_eq!(got, vec![(100, 0.5), (100, 0.8), (200, 0.5), (200, 0.8)]);
        assert!(cells.iter().enumerate().all(|(k, c)| c.index == k));
    }

    #[test]
    fn sparse_exact_recovery_cell_is_rejected() {
        let mut cfg = preset("exact-recovery").unwrap();
        cfg.grid.p = vec![0.01];
        assert!(cfg.validate().is_err());
        cfg.c1 = 0.1;
        cfg.validate().unwrap();
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = preset("lr14").unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }
}
