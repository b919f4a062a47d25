use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{AttackedModel, Interpretation};
use crate::protocols::ProtocolId;
use crate::{Error, Result};

pub const MIN_RESOLUTION: usize = 50;
/// Bisection stops once the bracketing error rates agree to this.
pub const E_TOLERANCE: f64 = 1e-4;
pub const LAMBDA_SEMANTICS: &str = "rho' = lambda * rho_attacked + (1 - lambda) * rho_honest per pair";
pub const CSV_HEADER: [&str; 6] = ["theta", "lambda", "e", "I_B", "chi", "flag"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub theta: f64,
    pub lambda: f64,
    pub e: f64,
    #[serde(rename = "I_B")]
    pub i_b: f64,
    pub chi: f64,
    /// 1 when Bob's information exceeds Eve's.
    pub flag: u8,
}

impl GridCell {
    pub fn margin(&self) -> f64 {
        self.i_b - self.chi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityGrid {
    pub protocol: ProtocolId,
    pub resolution: usize,
    pub interpretation: Interpretation,
    pub lambda_semantics: String,
    pub thetas: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// Theta-major: cell `(i, j)` sits at `i * lambdas.len() + j`.
    pub cells: Vec<GridCell>,
}

impl SecurityGrid {
    pub fn cell(&self, i_theta: usize, i_lambda: usize) -> &GridCell {
        &self.cells[i_theta * self.lambdas.len() + i_lambda]
    }

    /// Rows of constant λ along which `I_B − χ` changes sign more than once.
    pub fn monotonicity_violations(&self) -> usize {
        (0..self.lambdas.len())
            .filter(|&j| {
                let changes = (1..self.thetas.len())
                    .filter(|&i| (self.cell(i - 1, j).flag) != (self.cell(i, j).flag))
                    .count();
                changes > 1
            })
            .count()
    }

    /// CSV with `#`-prefixed metadata lines ahead of the fixed header.
    pub fn to_csv(&self, metadata: &[(String, String)]) -> Result<String> {
        let mut out = String::new();
        for (k, v) in metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&format!("# protocol={}\n", self.protocol));
        out.push_str(&format!("# resolution={}\n", self.resolution));
        out.push_str(&format!("# interpretation={}\n", self.interpretation.label()));
        out.push_str(&format!("# lambda_semantics={LAMBDA_SEMANTICS}\n"));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).map_err(|e| Error::Io(e.to_string()))?;
        for c in &self.cells {
            w.write_record(&[
                c.theta.to_string(),
                c.lambda.to_string(),
                c.e.to_string(),
                c.i_b.to_string(),
                c.chi.to_string(),
                c.flag.to_string(),
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv is utf-8"));
        Ok(out)
    }
}

/// `θ` on `[0, π/2]` and `λ` on `[0, 1]`, both ascending.
pub fn axes(resolution: usize) -> (Vec<f64>, Vec<f64>) {
    let step = |i: usize, top: f64| top * i as f64 / (resolution - 1) as f64;
    (
        (0..resolution).map(|i| step(i, FRAC_PI_2)).collect(),
        (0..resolution).map(|i| step(i, 1.0)).collect(),
    )
}

fn evaluate(model: &AttackedModel, lambda: f64, interp: &Interpretation) -> Result<GridCell> {
    let i_b = model.bob_information(lambda, interp.ib)?;
    let chi = model.eve_information(lambda, interp)?;
    Ok(GridCell {
        theta: model.theta,
        lambda,
        e: model.error_rate(lambda),
        i_b,
        chi,
        flag: u8::from(i_b > chi),
    })
}

pub fn build_grid(protocol: ProtocolId, resolution: usize, interp: Interpretation) -> Result<SecurityGrid> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Config(format!(
            "grid resolution {resolution} is below the minimum of {MIN_RESOLUTION}"
        )));
    }
    let (thetas, lambdas) = axes(resolution);
    let columns: Vec<Vec<GridCell>> = thetas
        .par_iter()
        .map(|&theta| {
            let m = AttackedModel::new(protocol, theta, interp.legs)?;
            lambdas.iter().map(|&l| evaluate(&m, l, &interp)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(SecurityGrid {
        protocol,
        resolution,
        interpretation: interp,
        lambda_semantics: LAMBDA_SEMANTICS.into(),
        thetas,
        lambdas,
        cells: columns.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub protocol: ProtocolId,
    pub e0: f64,
    pub theta_star: f64,
    pub lambda_star: f64,
    pub resolution: usize,
    pub interpretation: Interpretation,
    /// Smallest `e` among grid cells adjacent to a sign change, before
    /// refinement.
    pub grid_e0: f64,
    pub boundary_edges: usize,
    pub monotonicity_violations: usize,
}

/// Refine a sign change of `I_B − χ` between two grid neighbours.
fn bisect(
    protocol: ProtocolId,
    interp: &Interpretation,
    a: &GridCell,
    b: &GridCell,
    along_theta: bool,
    fixed: Option<&AttackedModel>,
) -> Result<GridCell> {
    let eval = |x: f64| -> Result<GridCell> {
        if along_theta {
            let m = AttackedModel::new(protocol, x, interp.legs)?;
            evaluate(&m, a.lambda, interp)
        } else {
            evaluate(fixed.expect("model for lambda edge"), x, interp)
        }
    };
    let key = |c: &GridCell| if along_theta { c.theta } else { c.lambda };
    let (mut lo, mut hi) = (*a, *b);
    for _ in 0..64 {
        if (hi.e - lo.e).abs() < E_TOLERANCE && (key(&hi) - key(&lo)).abs() < 1e-6 {
            break;
        }
        let mid = eval(0.5 * (key(&lo) + key(&hi)))?;
        if (mid.margin() > 0.0) == (lo.margin() > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // linear interpolation of the margin inside the final bracket
    let (mlo, mhi) = (lo.margin(), hi.margin());
    let w = if (mlo - mhi).abs() > 0.0 {
        mlo / (mlo - mhi)
    } else {
        0.5
    };
    let w = w.clamp(0.0, 1.0);
    let lerp = |x: f64, y: f64| x + w * (y - x);
    Ok(GridCell {
        theta: lerp(lo.theta, hi.theta),
        lambda: lerp(lo.lambda, hi.lambda),
        e: lerp(lo.e, hi.e),
        i_b: lerp(lo.i_b, hi.i_b),
        chi: lerp(lo.chi, hi.chi),
        flag: 0,
    })
}

/// `e₀ = min e` over the `I_B = χ` boundary.
pub fn tolerable_error(grid: &SecurityGrid) -> Result<ThresholdResult> {
    let (nt, nl) = (grid.thetas.len(), grid.lambdas.len());
    let interp = grid.interpretation;
    let mut edges: Vec<(usize, usize, bool)> = Vec::new();
    for i in 0..nt {
        for j in 0..nl {
            let c = grid.cell(i, j);
            if j + 1 < nl && c.flag != grid.cell(i, j + 1).flag {
                edges.push((i, j, false));
            }
            if i + 1 < nt && c.flag != grid.cell(i + 1, j).flag {
                edges.push((i, j, true));
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::NoThreshold);
    }
    let grid_e0 = edges
        .iter()
        .map(|&(i, j, th)| {
            let other = if th {
                grid.cell(i + 1, j)
            } else {
                grid.cell(i, j + 1)
            };
            grid.cell(i, j).e.min(other.e)
        })
        .fold(f64::INFINITY, f64::min);
    let crossings: Vec<GridCell> = edges
        .par_iter()
        .map(|&(i, j, along_theta)| {
            let a = grid.cell(i, j);
            if along_theta {
                bisect(grid.protocol, &interp, a, grid.cell(i + 1, j), true, None)
            } else {
                let m = AttackedModel::new(grid.protocol, grid.thetas[i], interp.legs)?;
                bisect(grid.protocol, &interp, a, grid.cell(i, j + 1), false, Some(&m))
            }
        })
        .collect::<Result<_>>()?;
    let best = crossings
        .iter()
        .min_by(|x, y| x.e.total_cmp(&y.e).then(x.theta.total_cmp(&y.theta)))
        .expect("nonempty");
    Ok(ThresholdResult {
        protocol: grid.protocol,
        e0: best.e,
        theta_star: best.theta,
        lambda_star: best.lambda,
        resolution: grid.resolution,
        interpretation: interp,
        grid_e0,
        boundary_edges: edges.len(),
        monotonicity_violations: grid.monotonicity_violations(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_floor() {
        assert!(build_grid(ProtocolId::PpGv, 49, Interpretation::default()).is_err());
    }

    #[test]
    fn gv_has_no_pair_grid() {
        assert!(matches!(
            build_grid(ProtocolId::Gv, 50, Interpretation::default()),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn edges_of_the_grid() {
        let g = build_grid(ProtocolId::ClGv, 50, Interpretation::default()).unwrap();
        for j in 0..50 {
            let c = g.cell(0, j);
            assert!(c.e.abs() < 1e-12 && c.chi.abs() < 1e-9, "theta = 0 column");
        }
        for i in 0..50 {
            let c = g.cell(i, 0);
            assert!(c.e.abs() < 1e-15 && c.chi.abs() < 1e-12);
            assert!((c.i_b - 2.0).abs() < 1e-12);
        }
        for c in &g.cells {
            assert_eq!(c.flag, u8::from(c.i_b > c.chi));
            assert!((0.0..=1.0).contains(&c.e) && c.chi >= -1e-12);
        }
    }

    #[test]
    fn threshold_is_near_the_cell_minimum() {
        let g = build_grid(ProtocolId::PpGv, 50, Interpretation::default()).unwrap();
        let t = tolerable_error(&g).unwrap();
        assert!(t.e0 <= t.grid_e0 + 0.75 / 49.0);
        assert!(t.e0 > 0.2 && t.e0 < 0.3, "{}", t.e0);
    }

    #[test]
    fn csv_layout() {
        let g = build_grid(ProtocolId::Dll, 50, Interpretation::default()).unwrap();
        let text = g.to_csv(&[("seed".into(), "1".into())]).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "theta,lambda,e,I_B,chi,flag");
        assert_eq!(body.len(), 2501);
        assert!(text.starts_with("# seed=1\n"));
    }
}
