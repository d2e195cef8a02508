//! The coordinated scheduling protocol, run on one frame.
//!
//! a–b) the FAP serves the femto-MT/beam pair with the largest normalized
//!      projection power;
//! c)   that femto-MT marks the MBS beams that keep its SINR at or above Γ_F;
//! d)   each macro-MT picks its best qualified beam and requests it when the
//!      resulting SINR meets Γ_M;
//! e)   the MBS serves the requested beam that interferes least with the
//!      femto-MT, choosing uniformly among the macro-MTs that requested it.

use std::collections::BTreeMap;

use rand::Rng;

pub use crate::model::QosThresholds;

use crate::channel::{projection_power, projection_powers, FrameRealization};
use crate::model::{FemtoLinkBudget, MacroService, ScheduleOutcome};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FemtoSelection {
    pub mt: usize,
    pub beam: usize,
    /// x_F.
    pub nsnr: f64,
}

/// Argmax of a `K_F × N_F` table of normalized projection powers. Ties go to
/// the lowest (MT, beam) pair.
pub fn select_max_nsnr(nsnr: &nalgebra::DMatrix<f64>) -> FemtoSelection {
    let mut best = FemtoSelection {
        mt: 0,
        beam: 0,
        nsnr: nsnr[(0, 0)],
    };
    for mt in 0..nsnr.nrows() {
        for beam in 0..nsnr.ncols() {
            let value = nsnr[(mt, beam)];
            if value > best.nsnr {
                best = FemtoSelection { mt, beam, nsnr: value };
            }
        }
    }
    best
}

pub fn femto_select(frame: &FrameRealization) -> FemtoSelection {
    select_max_nsnr(&projection_powers(&frame.h_f, &frame.fap_codebook))
}

/// A qualified MBS beam as seen by the selected femto-MT.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualifiedBeam {
    pub beam: usize,
    /// y_j = |h_{M,k*}ᴴ f_j|².
    pub interference: f64,
    /// γ_{F,j} = x_F / (λ_F y_j + μ_F).
    pub sinr: f64,
}

/// Beams `j` with `x_F / (λ_F y_j + μ_F) ≥ Γ_F`, sorted by ascending `y_j`.
pub fn qualify(
    nsnr: f64,
    interference: &[f64],
    budget: &FemtoLinkBudget,
    gamma_f: f64,
) -> Vec<QualifiedBeam> {
    let mut beams: Vec<QualifiedBeam> = interference
        .iter()
        .enumerate()
        .map(|(beam, &y)| QualifiedBeam {
            beam,
            interference: y,
            sinr: nsnr / (budget.lambda_f * y + budget.mu_f),
        })
        .filter(|b| b.sinr >= gamma_f)
        .collect();
    beams.sort_by(|a, b| {
        a.interference
            .total_cmp(&b.interference)
            .then(a.beam.cmp(&b.beam))
    });
    beams
}

/// Interference projections `|h_{M,k}ᴴ f_j|²` of femto-MT `mt` on every MBS
/// beam.
pub fn femto_interference(frame: &FrameRealization, mt: usize) -> Vec<f64> {
    (0..frame.n_mbs_antennas())
        .map(|j| projection_power(&frame.h_m, mt, &frame.mbs_codebook, j))
        .collect()
}

pub fn qualified_beams(
    frame: &FrameRealization,
    selection: &FemtoSelection,
    thresholds: &QosThresholds,
) -> Vec<QualifiedBeam> {
    let interference = femto_interference(frame, selection.mt);
    qualify(
        selection.nsnr,
        &interference,
        &frame.links.budget.femto[selection.mt],
        thresholds.gamma_f,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroRequest {
    pub beam: usize,
    /// Best-beam SINR γ_{M,k}.
    pub sinr: f64,
}

/// Per-MT argmax over `candidates` of `sinr[k][j]`, kept when it reaches
/// `gamma_m`. `sinr` is indexed by MT then by MBS beam index.
pub fn best_beam_requests<S: AsRef<[f64]>>(
    sinr: &[S],
    candidates: &[usize],
    gamma_m: f64,
) -> BTreeMap<usize, MacroRequest> {
    let mut requests = BTreeMap::new();
    if candidates.is_empty() {
        return requests;
    }
    for (mt, row) in sinr.iter().enumerate() {
        let row = row.as_ref();
        let mut best = MacroRequest {
            beam: candidates[0],
            sinr: row[candidates[0]],
        };
        for &beam in &candidates[1..] {
            if row[beam] > best.sinr {
                best = MacroRequest {
                    beam,
                    sinr: row[beam],
                };
            }
        }
        if best.sinr >= gamma_m {
            requests.insert(mt, best);
        }
    }
    requests
}

/// Steps d) of the protocol on a frame: every macro-MT evaluates the
/// qualified beams while the FAP transmits on `femto_beam`.
pub fn macro_best_beams(
    frame: &FrameRealization,
    qualified: &[QualifiedBeam],
    femto_beam: usize,
    thresholds: &QosThresholds,
) -> BTreeMap<usize, MacroRequest> {
    if qualified.is_empty() {
        return BTreeMap::new();
    }
    let mut candidates: Vec<usize> = qualified.iter().map(|q| q.beam).collect();
    candidates.sort_unstable();
    let budget = &frame.links.budget.macro_mts;
    let n_m = frame.n_mbs_antennas();
    let sinr: Vec<Vec<f64>> = (0..frame.n_macro_mts())
        .map(|k| {
            let leak = projection_power(&frame.g_f, k, &frame.fap_codebook, femto_beam);
            let denom = budget[k].lambda_m * leak + budget[k].mu_m;
            let mut row = vec![0.0; n_m];
            for &j in &candidates {
                row[j] = projection_power(&frame.g_m, k, &frame.mbs_codebook, j) / denom;
            }
            row
        })
        .collect();
    best_beam_requests(&sinr, &candidates, thresholds.gamma_m)
}

/// Step e): among the requested beams pick the one with the smallest
/// interference projection `interference[j]` onto the femto-MT, then one of
/// its requesters uniformly at random. Draws from `rng` only when more than
/// one macro-MT requested that beam.
pub fn mbs_select<R: Rng + ?Sized>(
    requests: &BTreeMap<usize, MacroRequest>,
    interference: &[f64],
    rng: &mut R,
) -> Option<MacroService> {
    let beam = requests
        .values()
        .map(|r| r.beam)
        .min_by(|&a, &b| interference[a].total_cmp(&interference[b]).then(a.cmp(&b)))?;
    let contenders: Vec<(usize, f64)> = requests
        .iter()
        .filter(|(_, r)| r.beam == beam)
        .map(|(&mt, r)| (mt, r.sinr))
        .collect();
    let pick = if contenders.len() > 1 {
        rng.random_range(0..contenders.len())
    } else {
        0
    };
    let (mt, sinr) = contenders[pick];
    Some(MacroService {
        beam,
        mt,
        sinr,
        contenders: contenders.len(),
    })
}

/// Runs steps a–e on one frame.
pub fn run_frame<R: Rng + ?Sized>(
    frame: &FrameRealization,
    thresholds: &QosThresholds,
    rng: &mut R,
) -> ScheduleOutcome {
    let selection = femto_select(frame);
    let interference = femto_interference(frame, selection.mt);
    let budget = frame.links.budget.femto[selection.mt];
    let qualified = qualify(selection.nsnr, &interference, &budget, thresholds.gamma_f);
    let requests = macro_best_beams(frame, &qualified, selection.beam, thresholds);
    let macro_service = mbs_select(&requests, &interference, rng);

    let sinr_femto = match macro_service {
        Some(service) => {
            qualified
                .iter()
                .find(|q| q.beam == service.beam)
                .expect("requested beams are qualified")
                .sinr
        }
        None => selection.nsnr / budget.mu_f,
    };

    ScheduleOutcome {
        femto_mt: selection.mt,
        femto_beam: selection.beam,
        femto_nsnr: selection.nsnr,
        qualified_beams: qualified.iter().map(|q| q.beam).collect(),
        macro_requests: requests.iter().map(|(&mt, r)| (mt, r.beam)).collect(),
        sinr_femto,
        macro_service,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::channel::{drop_users, realize_frame_with, DropLinks, PathLossModel, UserDrop};
    use crate::model::{LinkBudget, MacroLinkBudget, PathGains, ScenarioConfig};

    fn real(rows: usize, cols: usize, values: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_row_iterator(rows, cols, values.iter().map(|&v| Complex64::new(v, 0.0)))
    }

    fn identity(n: usize) -> DMatrix<Complex64> {
        DMatrix::identity(n, n)
    }

    fn links(femto: Vec<FemtoLinkBudget>, macro_mts: Vec<MacroLinkBudget>) -> Arc<DropLinks> {
        let kf = femto.len();
        let km = macro_mts.len();
        Arc::new(DropLinks {
            drop: UserDrop {
                femto_positions: vec![Default::default(); kf],
                macro_positions: vec![Default::default(); km],
                fap_position: Default::default(),
                mbs_position: Default::default(),
            },
            gains: PathGains {
                beta_f: vec![1e-6; kf],
                beta_m: vec![1e-9; kf],
                alpha_m: vec![1e-9; km],
                alpha_f: vec![1e-9; km],
            },
            budget: LinkBudget { femto, macro_mts },
        })
    }

    #[test]
    fn single_candidate_femto_selection() {
        let table = DMatrix::from_element(1, 1, 0.42);
        let sel = select_max_nsnr(&table);
        assert_eq!((sel.mt, sel.beam, sel.nsnr), (0, 0, 0.42));
    }

    #[test]
    fn hand_traced_femto_argmax() {
        let table = DMatrix::from_row_slice(2, 2, &[0.3, 1.7, 0.9, 0.4]);
        let sel = select_max_nsnr(&table);
        assert_eq!((sel.mt, sel.beam, sel.nsnr), (0, 1, 1.7));
        let tied = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 1.0, 0.2]);
        assert_eq!(select_max_nsnr(&tied).beam, 1);
        assert_eq!(select_max_nsnr(&tied).mt, 0);
    }

    #[test]
    fn hand_traced_qualification() {
        let budget = FemtoLinkBudget {
            lambda_f: 1.0,
            mu_f: 0.1,
        };
        let q = qualify(1.0, &[0.1, 0.6, 0.3, 0.2], &budget, 2.0);
        let order: Vec<usize> = q.iter().map(|b| b.beam).collect();
        assert_eq!(order, vec![0, 3, 2]);
        assert!(q.iter().all(|b| b.sinr >= 2.0));
    }

    #[test]
    fn qualification_limits() {
        let budget = FemtoLinkBudget {
            lambda_f: 0.5,
            mu_f: 0.1,
        };
        let y = [0.3, 5.0, 40.0, 0.01];
        assert_eq!(qualify(1.0, &y, &budget, 1e-12).len(), 4);
        // x_F < μ_F Γ_F: nothing qualifies even without interference.
        assert!(qualify(0.09, &[0.0, 0.0], &budget, 1.0).is_empty());
    }

    #[test]
    fn hand_traced_requests() {
        let sinr = [vec![0.5, 3.0], vec![1.2, 0.8]];
        let requests = best_beam_requests(&sinr, &[0, 1], 1.0);
        assert_eq!(requests.len(), 2);
        assert_eq!(requests[&0].beam, 1);
        assert_eq!(requests[&1].beam, 0);

        let all = best_beam_requests(&sinr, &[0, 1], 1e-12);
        assert_eq!(all.len(), 2);
        let single = best_beam_requests(&sinr, &[0], 1e-12);
        assert!(single.values().all(|r| r.beam == 0));
        assert!(best_beam_requests(&sinr, &[], 1e-12).is_empty());
    }

    #[test]
    fn mbs_prefers_least_interfering_requested_beam() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut requests = BTreeMap::new();
        requests.insert(3, MacroRequest { beam: 0, sinr: 20.0 });
        requests.insert(7, MacroRequest { beam: 1, sinr: 15.0 });
        let chosen = mbs_select(&requests, &[0.7, 0.2], &mut rng).unwrap();
        assert_eq!((chosen.beam, chosen.mt, chosen.contenders), (1, 7, 1));

        let single: BTreeMap<_, _> = [(4, MacroRequest { beam: 1, sinr: 11.0 })].into();
        let chosen = mbs_select(&single, &[0.1, 0.9], &mut rng).unwrap();
        assert_eq!((chosen.beam, chosen.mt), (1, 4));
        assert!(mbs_select(&BTreeMap::new(), &[0.1], &mut rng).is_none());
    }

    #[test]
    fn mbs_tie_break_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let requests: BTreeMap<_, _> = (0..4)
            .map(|mt| (mt, MacroRequest { beam: 2, sinr: 12.0 }))
            .collect();
        let trials = 400_000;
        let mut counts = [0usize; 4];
        for _ in 0..trials {
            counts[mbs_select(&requests, &[1.0, 1.0, 0.5], &mut rng).unwrap().mt] += 1;
        }
        let p = 0.25;
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - trials as f64 * p).abs() < 3.0 * sd, "{counts:?}");
        }
    }

    /// 2 femto-MTs, 2 FAP beams, 2 MBS beams, 2 macro-MTs with identity
    /// codebooks so every projection is a squared entry.
    fn golden_frame() -> FrameRealization {
        let femto = vec![
            FemtoLinkBudget {
                lambda_f: 1.0,
                mu_f: 0.1,
            },
            FemtoLinkBudget {
                lambda_f: 2.0,
                mu_f: 0.5,
            },
        ];
        let macro_mts = vec![
            MacroLinkBudget {
                lambda_m: 1.0,
                mu_m: 0.1,
            },
            MacroLinkBudget {
                lambda_m: 0.5,
                mu_m: 0.2,
            },
        ];
        FrameRealization {
            // NSNR table {0.3, 1.7; 0.9, 0.4}
            h_f: real(2, 2, &[0.3f64.sqrt(), 1.7f64.sqrt(), 0.9f64.sqrt(), 0.4f64.sqrt()]),
            // femto-MT 0 sees y = {0.2, 0.5}
            h_m: real(2, 2, &[0.2f64.sqrt(), 0.5f64.sqrt(), 0.1, 0.1]),
            // macro signal projections {1.0, 2.0; 3.0, 0.5}
            g_m: real(2, 2, &[1.0, 2.0f64.sqrt(), 3.0f64.sqrt(), 0.5f64.sqrt()]),
            // leakage through FAP beam 1: {0.4, 1.0}
            g_f: real(2, 2, &[0.0, 0.4f64.sqrt(), 0.0, 1.0]),
            fap_codebook: identity(2),
            mbs_codebook: identity(2),
            links: links(femto, macro_mts),
        }
    }

    #[test]
    fn golden_frame_trace() {
        // a-b) argmax of {0.3, 1.7; 0.9, 0.4} → MT 0, beam 1, x_F = 1.7.
        // c)   λ=1, μ=0.1: γ_{F,0} = 1.7/0.3 = 5.667, γ_{F,1} = 1.7/0.6 = 2.833;
        //      with Γ_F = 3 only beam 0 qualifies.
        // d)   MT 0: 1.0/(1·0.4+0.1) = 2.0; MT 1: 3.0/(0.5·1.0+0.2) = 4.286;
        //      Γ_M = 2.5 → only MT 1 requests beam 0.
        // e)   beam 0, MT 1, γ_F = 5.667, γ_M = 4.286.
        let frame = golden_frame();
        let thresholds = QosThresholds {
            gamma_f: 3.0,
            gamma_m: 2.5,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = run_frame(&frame, &thresholds, &mut rng);
        assert_eq!((out.femto_mt, out.femto_beam), (0, 1));
        assert!((out.femto_nsnr - 1.7).abs() < 1e-12);
        assert_eq!(out.qualified_beams, vec![0]);
        assert_eq!(out.macro_requests, [(1, 0)].into());
        let service = out.macro_service.unwrap();
        assert_eq!((service.beam, service.mt, service.contenders), (0, 1, 1));
        assert!((out.sinr_femto - 1.7 / 0.3).abs() < 1e-9);
        assert!((service.sinr - 3.0 / 0.7).abs() < 1e-9);
        assert!(out.check(&thresholds).is_ok());

        // Both beams qualify at Γ_F = 2; MT 0 then prefers beam 1 (2/0.5 = 4)
        // and MT 1 beam 0; the MBS takes beam 0 (y = 0.2 < 0.5).
        let relaxed = QosThresholds {
            gamma_f: 2.0,
            gamma_m: 2.5,
        };
        let out = run_frame(&frame, &relaxed, &mut rng);
        assert_eq!(out.qualified_beams, vec![0, 1]);
        assert_eq!(out.macro_requests, [(0, 1), (1, 0)].into());
        assert_eq!(out.n_best_beams(), 2);
        assert_eq!(out.macro_beam(), Some(0));
        assert_eq!(out.macro_mt(), Some(1));
    }

    #[test]
    fn macro_off_frame_is_interference_free() {
        let frame = golden_frame();
        let strict = QosThresholds {
            gamma_f: 100.0,
            gamma_m: 1.0,
        };
        let out = run_frame(&frame, &strict, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(out.qualified_beams.is_empty());
        assert!(!out.macro_active());
        assert!(out.sinr_macro().is_none());
        assert!((out.sinr_femto - 1.7 / 0.1).abs() < 1e-9);
    }

    #[test]
    fn outcome_invariants_over_random_frames() {
        let cfg = ScenarioConfig::case_one();
        let thresholds = cfg.thresholds();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let drop = drop_users(&cfg, &mut rng);
        let links = Arc::new(DropLinks::new(&cfg, drop, &PathLossModel::default()).unwrap());
        for _ in 0..100_000 {
            let frame = realize_frame_with(&cfg, &links, &mut rng);
            let out = run_frame(&frame, &thresholds, &mut rng);
            out.check(&thresholds).unwrap();
            assert!(out.sinr_femto >= thresholds.gamma_f || !out.macro_active());
            if let Some(service) = out.macro_service {
                // Argmin invariance: exhaustive minimum over the requests.
                let y = femto_interference(&frame, out.femto_mt);
                let min = out
                    .macro_requests
                    .values()
                    .map(|&b| y[b])
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(y[service.beam], min);
            }
        }
    }

    #[test]
    fn femto_selection_ignores_path_gain() {
        let cfg = ScenarioConfig::case_one();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let drop = drop_users(&cfg, &mut rng);
        let links = Arc::new(DropLinks::new(&cfg, drop, &PathLossModel::default()).unwrap());
        let mut scaled = (*links).clone();
        scaled.gains.beta_f[2] *= 1e-3;
        scaled.budget = LinkBudget::from_gains(&cfg, &scaled.gains).unwrap();
        let scaled = Arc::new(scaled);
        for _ in 0..1000 {
            let frame = realize_frame_with(&cfg, &links, &mut rng);
            let other = FrameRealization {
                links: Arc::clone(&scaled),
                ..frame.clone()
            };
            assert_eq!(femto_select(&frame), femto_select(&other));
        }
    }
}
