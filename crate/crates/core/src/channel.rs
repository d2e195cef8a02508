//! Randomness of the scenario: user drops, distance-based path loss,
//! i.i.d. Rayleigh fading and isotropically random unitary codebooks.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::ModelError;
use crate::model::{LinkBudget, PathGains, ScenarioConfig};

/// Distances below this are clamped before evaluating path loss (meters).
pub const MIN_DISTANCE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Positions of one random layout. The MBS sits at the origin and the FAP
/// on the positive x axis.
#[derive(Debug, Clone, PartialEq)]
pub struct UserDrop {
    pub femto_positions: Vec<Point>,
    pub macro_positions: Vec<Point>,
    pub fap_position: Point,
    pub mbs_position: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkClass {
    /// MBS → outdoor macro-MT.
    MbsOutdoor,
    /// MBS → indoor femto-MT.
    MbsIndoor,
    /// FAP → indoor femto-MT.
    FapIndoor,
    /// FAP → outdoor macro-MT.
    FapOutdoor,
}

/// `intercept + slope·log10(d) + wall_loss` in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossCoefficients {
    pub intercept: f64,
    pub slope: f64,
    pub wall_loss: f64,
}

impl PathLossCoefficients {
    pub fn loss_db(&self, distance: f64) -> f64 {
        self.intercept + self.slope * distance.max(MIN_DISTANCE).log10() + self.wall_loss
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    pub mbs_outdoor: PathLossCoefficients,
    pub mbs_indoor: PathLossCoefficients,
    pub fap_indoor: PathLossCoefficients,
    pub fap_outdoor: PathLossCoefficients,
}

impl Default for PathLossModel {
    /// Dual-stripe style urban macro / indoor femto model with a 10 dB wall.
    fn default() -> Self {
        let macro_ = PathLossCoefficients {
            intercept: 15.3,
            slope: 37.6,
            wall_loss: 0.0,
        };
        let femto = PathLossCoefficients {
            intercept: 38.5,
            slope: 20.0,
            wall_loss: 0.0,
        };
        Self {
            mbs_outdoor: macro_,
            mbs_indoor: PathLossCoefficients {
                wall_loss: 10.0,
                ..macro_
            },
            fap_indoor: femto,
            fap_outdoor: PathLossCoefficients {
                wall_loss: 10.0,
                ..femto
            },
        }
    }
}

impl PathLossModel {
    pub fn coefficients(&self, class: LinkClass) -> &PathLossCoefficients {
        match class {
            LinkClass::MbsOutdoor => &self.mbs_outdoor,
            LinkClass::MbsIndoor => &self.mbs_indoor,
            LinkClass::FapIndoor => &self.fap_indoor,
            LinkClass::FapOutdoor => &self.fap_outdoor,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let classes = [
            ("mbs_outdoor", &self.mbs_outdoor),
            ("mbs_indoor", &self.mbs_indoor),
            ("fap_indoor", &self.fap_indoor),
            ("fap_outdoor", &self.fap_outdoor),
        ];
        for (key, c) in classes {
            if !(c.slope.is_finite() && c.slope > 0.0) {
                return Err(ModelError::invalid(key, "slope must be positive"));
            }
            if !(c.wall_loss.is_finite() && c.wall_loss >= 0.0) {
                return Err(ModelError::invalid(key, "wall loss must be non-negative"));
            }
            // Gains must stay in (0, 1] from the clamp distance on.
            if !(c.intercept.is_finite() && c.loss_db(MIN_DISTANCE) >= 0.0) {
                return Err(ModelError::invalid(key, "loss at 1 m must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Linear gain of `class` at `distance` meters.
pub fn path_gain(model: &PathLossModel, class: LinkClass, distance: f64) -> f64 {
    10f64.powf(-model.coefficients(class).loss_db(distance) / 10.0)
}

fn uniform_in_disk<R: Rng + ?Sized>(center: Point, radius: f64, rng: &mut R) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
}

/// Drops the femto-MTs uniformly over the femtocell disk and the macro-MTs
/// uniformly over the macrocell disk.
pub fn drop_users<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> UserDrop {
    let mbs_position = Point::default();
    let fap_position = Point::new(cfg.mbs_fap_distance, 0.0);
    let femto_positions = (0..cfg.n_femto_mts)
        .map(|_| uniform_in_disk(fap_position, cfg.femto_radius, rng))
        .collect();
    let macro_positions = (0..cfg.n_macro_mts)
        .map(|_| uniform_in_disk(mbs_position, cfg.macro_radius, rng))
        .collect();
    UserDrop {
        femto_positions,
        macro_positions,
        fap_position,
        mbs_position,
    }
}

/// Path gains of every link in a drop.
pub fn path_gains(model: &PathLossModel, drop: &UserDrop) -> PathGains {
    let femto = &drop.femto_positions;
    let macro_ = &drop.macro_positions;
    PathGains {
        beta_f: femto
            .iter()
            .map(|p| path_gain(model, LinkClass::FapIndoor, p.distance(&drop.fap_position)))
            .collect(),
        beta_m: femto
            .iter()
            .map(|p| path_gain(model, LinkClass::MbsIndoor, p.distance(&drop.mbs_position)))
            .collect(),
        alpha_m: macro_
            .iter()
            .map(|p| path_gain(model, LinkClass::MbsOutdoor, p.distance(&drop.mbs_position)))
            .collect(),
        alpha_f: macro_
            .iter()
            .map(|p| path_gain(model, LinkClass::FapOutdoor, p.distance(&drop.fap_position)))
            .collect(),
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// `rows × cols` matrix of i.i.d. CN(0, 1) entries, filled row by row.
pub fn draw_fading<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    assert!(rows >= 1 && cols >= 1, "fading matrix must be non-empty");
    DMatrix::from_row_iterator(rows, cols, (0..rows * cols).map(|_| complex_gaussian(rng)))
}

/// Haar-distributed `n × n` unitary matrix; column `i` is beam `i`.
///
/// QR of a complex Gaussian matrix, with the phases of R's diagonal moved
/// into Q so the factorization is unique.
pub fn draw_codebook<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let gaussian = draw_fading(n, n, rng);
    let qr = gaussian.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            let mut column = q.column_mut(j);
            column *= phase;
        }
    }
    q
}

/// Large-scale state of a drop: fixed for all of its frames.
#[derive(Debug, Clone, PartialEq)]
pub struct DropLinks {
    pub drop: UserDrop,
    pub gains: PathGains,
    pub budget: LinkBudget,
}

impl DropLinks {
    pub fn new(
        cfg: &ScenarioConfig,
        drop: UserDrop,
        model: &PathLossModel,
    ) -> Result<Self, ModelError> {
        let gains = path_gains(model, &drop);
        let budget = LinkBudget::from_gains(cfg, &gains)?;
        Ok(Self {
            drop,
            gains,
            budget,
        })
    }
}

/// Small-scale state of one frame together with the drop it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRealization {
    /// K_F × N_F, row k is h_{F,k}.
    pub h_f: DMatrix<Complex64>,
    /// K_F × N_M, row k is h_{M,k}.
    pub h_m: DMatrix<Complex64>,
    /// K_M × N_M, row k is g_{M,k}.
    pub g_m: DMatrix<Complex64>,
    /// K_M × N_F, row k is g_{F,k}.
    pub g_f: DMatrix<Complex64>,
    /// N_F × N_F, column i is w_i.
    pub fap_codebook: DMatrix<Complex64>,
    /// N_M × N_M, column j is f_j.
    pub mbs_codebook: DMatrix<Complex64>,
    pub links: Arc<DropLinks>,
}

impl FrameRealization {
    pub fn n_femto_mts(&self) -> usize {
        self.h_f.nrows()
    }

    pub fn n_macro_mts(&self) -> usize {
        self.g_m.nrows()
    }

    pub fn n_fap_antennas(&self) -> usize {
        self.fap_codebook.ncols()
    }

    pub fn n_mbs_antennas(&self) -> usize {
        self.mbs_codebook.ncols()
    }

    pub fn beta_f(&self) -> &[f64] {
        &self.links.gains.beta_f
    }

    pub fn beta_m(&self) -> &[f64] {
        &self.links.gains.beta_m
    }

    pub fn alpha_m(&self) -> &[f64] {
        &self.links.gains.alpha_m
    }

    pub fn alpha_f(&self) -> &[f64] {
        &self.links.gains.alpha_f
    }
}

/// Squared magnitudes |aₖᴴ bⱼ|² for every row k of `rows` and column j of
/// `beams`.
pub fn projection_powers(rows: &DMatrix<Complex64>, beams: &DMatrix<Complex64>) -> DMatrix<f64> {
    (rows.conjugate() * beams).map(|c| c.norm_sqr())
}

/// |aᴴ b|² for row `row` of `rows` and column `beam` of `beams`.
pub fn projection_power(
    rows: &DMatrix<Complex64>,
    row: usize,
    beams: &DMatrix<Complex64>,
    beam: usize,
) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..rows.ncols() {
        acc += rows[(row, n)].conj() * beams[(n, beam)];
    }
    acc.norm_sqr()
}

/// Draws fresh fading and codebooks for one frame of an existing drop.
pub fn realize_frame_with<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    links: &Arc<DropLinks>,
    rng: &mut R,
) -> FrameRealization {
    let (kf, km) = (cfg.n_femto_mts, cfg.n_macro_mts);
    let (nf, nm) = (cfg.n_fap_antennas, cfg.n_mbs_antennas);
    FrameRealization {
        h_f: draw_fading(kf, nf, rng),
        h_m: draw_fading(kf, nm, rng),
        g_m: draw_fading(km, nm, rng),
        g_f: draw_fading(km, nf, rng),
        fap_codebook: draw_codebook(nf, rng),
        mbs_codebook: draw_codebook(nm, rng),
        links: Arc::clone(links),
    }
}

/// One frame for `drop`; path gains follow the drop, fading and codebooks are
/// fresh.
pub fn realize_frame<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    drop: &UserDrop,
    model: &PathLossModel,
    rng: &mut R,
) -> Result<FrameRealization, ModelError> {
    let links = Arc::new(DropLinks::new(cfg, drop.clone(), model)?);
    Ok(realize_frame_with(cfg, &links, rng))
}
