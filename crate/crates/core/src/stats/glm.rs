//! Maximum-likelihood GLM fitting via iteratively reweighted least
//! squares, for the two families the analysis needs: binomial with a
//! logit link and negative binomial (NB2) with a log link.

use super::design::DesignMatrix;
use super::linalg;
use super::{StatsError, IRLS_MAX_ITERATIONS, IRLS_TOLERANCE, NEGBIN_MAX_OUTER_ITERATIONS, THETA_DIVERGENCE_LIMIT};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::digamma;

/// Coefficient magnitude past which a still-shrinking deviance is taken
/// as evidence of perfect separation.
const SEPARATION_COEF_LIMIT: f64 = 15.0;
const MIN_WEIGHT: f64 = 1e-10;
const MAX_STEP_HALVINGS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    NegBinomial,
    BinomialLogit,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::NegBinomial => "NEG_BINOMIAL",
            Family::BinomialLogit => "BINOMIAL_LOGIT",
        }
    }
}

/// Per-term estimate with its Wald statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TermFit {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub z_value: f64,
    pub p_value: f64,
}

/// A fitted regression model.
#[derive(Debug, Clone)]
pub struct ModelFit {
    pub family: Family,
    /// "(Intercept)" first, then predictors in design order.
    pub terms: Vec<TermFit>,
    pub null_deviance: f64,
    pub residual_deviance: f64,
    /// Negative-binomial dispersion; `None` for logistic fits and for
    /// Poisson fallbacks after a diverging dispersion.
    pub theta: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub diagnostic: Option<String>,
}

impl ModelFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.estimate)
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.std_error)
    }

    pub fn p_value(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.p_value)
    }

    /// Mean response for each row of `x`, whose columns must carry the
    /// fit's predictor terms.
    pub fn predict(&self, x: &DesignMatrix) -> Result<Vec<f64>, StatsError> {
        let predictor_names: Vec<&str> =
            self.terms.iter().skip(1).map(|t| t.name.as_str()).collect();
        let selected = x.select(&predictor_names)?;
        let rows = selected.rows_with_intercept();
        Ok(rows
            .iter()
            .map(|row| {
                let eta: f64 =
                    row.iter().zip(&self.terms).map(|(x, t)| x * t.estimate).sum();
                match self.family {
                    Family::BinomialLogit => 1.0 / (1.0 + (-eta).exp()),
                    Family::NegBinomial => eta.exp(),
                }
            })
            .collect())
    }
}

fn standard_normal_two_sided_p(z: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * (1.0 - normal.cdf(z.abs()))).clamp(0.0, 1.0)
}

fn validate_shape(x: &DesignMatrix, y: &[f64]) -> Result<(), StatsError> {
    if y.len() != x.n_rows() {
        return Err(StatsError::LengthMismatch(y.len(), x.n_rows()));
    }
    if x.n_rows() < x.n_cols() + 1 {
        return Err(StatsError::TooFewObservations { rows: x.n_rows(), cols: x.n_cols() + 1 });
    }
    Ok(())
}

fn singular_error(x: &DesignMatrix, pivot: usize) -> StatsError {
    let name = x.term_names().get(pivot).cloned().unwrap_or_else(|| format!("#{pivot}"));
    StatsError::SingularDesign(name)
}

/// One weighted least-squares step: solves X'WX beta = X'Wz.
fn wls_step(rows: &[Vec<f64>], w: &[f64], z: &[f64]) -> Result<Vec<f64>, usize> {
    let p = rows[0].len();
    let mut xtwx = vec![vec![0.0; p]; p];
    let mut xtwz = vec![0.0; p];
    for (row, (&wi, &zi)) in rows.iter().zip(w.iter().zip(z.iter())) {
        for j in 0..p {
            let wx = wi * row[j];
            xtwz[j] += wx * zi;
            for k in j..p {
                xtwx[j][k] += wx * row[k];
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            xtwx[j][k] = xtwx[k][j];
        }
    }
    linalg::solve(xtwx, xtwz)
}

fn fisher_information(rows: &[Vec<f64>], w: &[f64]) -> Vec<Vec<f64>> {
    let p = rows[0].len();
    let mut xtwx = vec![vec![0.0; p]; p];
    for (row, &wi) in rows.iter().zip(w.iter()) {
        for j in 0..p {
            for k in j..p {
                xtwx[j][k] += wi * row[j] * row[k];
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            xtwx[j][k] = xtwx[k][j];
        }
    }
    xtwx
}

fn binomial_deviance(y: &[f64], mu: &[f64]) -> f64 {
    let mut dev = 0.0;
    for (&yi, &mi) in y.iter().zip(mu) {
        let m = mi.clamp(1e-12, 1.0 - 1e-12);
        dev += if yi > 0.5 { -2.0 * m.ln() } else { -2.0 * (1.0 - m).ln() };
    }
    dev
}

fn poisson_deviance(y: &[f64], mu: &[f64]) -> f64 {
    let mut dev = 0.0;
    for (&yi, &mi) in y.iter().zip(mu) {
        let term = if yi > 0.0 { yi * (yi / mi).ln() - (yi - mi) } else { mi };
        dev += 2.0 * term;
    }
    dev
}

fn negbin_deviance(y: &[f64], mu: &[f64], theta: f64) -> f64 {
    let mut dev = 0.0;
    for (&yi, &mi) in y.iter().zip(mu) {
        let mut term = -(yi + theta) * ((yi + theta) / (mi + theta)).ln();
        if yi > 0.0 {
            term += yi * (yi / mi).ln();
        }
        dev += 2.0 * term;
    }
    dev
}

struct IrlsOutcome {
    beta: Vec<f64>,
    mu: Vec<f64>,
    weights: Vec<f64>,
    deviance: f64,
    iterations: usize,
    converged: bool,
    deviance_shrank_throughout: bool,
}

/// Shared IRLS loop. `reweight(mu) -> w`, `working_response(y, mu, eta) -> z`
/// and `deviance(y, mu)` define the family.
fn irls<W, D>(
    rows: &[Vec<f64>],
    y: &[f64],
    mut eta: Vec<f64>,
    mut mu: Vec<f64>,
    reweight: W,
    deviance: D,
    mean_from_eta: impl Fn(f64) -> f64,
    dmu_deta_inverse: impl Fn(f64) -> f64,
) -> Result<IrlsOutcome, usize>
where
    W: Fn(f64) -> f64,
    D: Fn(&[f64], &[f64]) -> f64,
{
    let mut dev = deviance(y, &mu);
    let mut beta: Option<Vec<f64>> = None;
    let mut iterations = 0;
    let mut converged = false;
    let mut shrank = true;
    for _ in 0..IRLS_MAX_ITERATIONS {
        iterations += 1;
        let w: Vec<f64> = mu.iter().map(|&m| reweight(m).max(MIN_WEIGHT)).collect();
        let z: Vec<f64> = y
            .iter()
            .zip(mu.iter().zip(eta.iter()))
            .map(|(&yi, (&mi, &ei))| ei + (yi - mi) * dmu_deta_inverse(mi))
            .collect();
        let mut proposal = wls_step(rows, &w, &z)?;
        let mut halvings = 0;
        let (new_eta, new_mu, new_dev) = loop {
            let e: Vec<f64> = rows
                .iter()
                .map(|row| row.iter().zip(&proposal).map(|(x, b)| x * b).sum())
                .collect();
            let m: Vec<f64> = e.iter().map(|&ei| mean_from_eta(ei)).collect();
            let d = deviance(y, &m);
            let acceptable = d.is_finite() && d <= dev + 1e-10;
            if acceptable || halvings >= MAX_STEP_HALVINGS || beta.is_none() {
                break (e, m, d);
            }
            // Step halving back toward the previous accepted estimate.
            let prev = beta.as_ref().unwrap();
            proposal =
                proposal.iter().zip(prev).map(|(n, p)| 0.5 * (n + p)).collect();
            halvings += 1;
        };
        if new_dev > dev + 1e-10 {
            shrank = false;
        }
        let rel_change = (dev - new_dev).abs() / (0.1 + new_dev.abs());
        beta = Some(proposal);
        eta = new_eta;
        mu = new_mu;
        dev = new_dev;
        if rel_change < IRLS_TOLERANCE {
            converged = true;
            break;
        }
    }
    let beta = beta.expect("at least one IRLS iteration runs");
    let weights: Vec<f64> = mu.iter().map(|&m| reweight(m).max(MIN_WEIGHT)).collect();
    Ok(IrlsOutcome {
        beta,
        mu,
        weights,
        deviance: dev,
        iterations,
        converged,
        deviance_shrank_throughout: shrank,
    })
}

fn wald_terms(
    names: Vec<String>,
    beta: &[f64],
    rows: &[Vec<f64>],
    weights: &[f64],
    x: &DesignMatrix,
) -> Result<Vec<TermFit>, StatsError> {
    let info = fisher_information(rows, weights);
    let cov = linalg::invert(&info).map_err(|pivot| singular_error(x, pivot))?;
    Ok(names
        .into_iter()
        .enumerate()
        .map(|(j, name)| {
            let se = cov[j][j].max(0.0).sqrt();
            let z = if se > 0.0 { beta[j] / se } else { 0.0 };
            TermFit {
                name,
                estimate: beta[j],
                std_error: se,
                z_value: z,
                p_value: standard_normal_two_sided_p(z),
            }
        })
        .collect())
}

/// Maximum-likelihood logistic regression.
///
/// Converges when the relative deviance change drops below 1e-8, within
/// 50 iterations, with step halving so the deviance never increases
/// across accepted iterations. Standard errors come from the inverse
/// Fisher information; p-values are two-sided Wald tests.
pub fn fit_logistic(x: &DesignMatrix, y: &[f64]) -> Result<ModelFit, StatsError> {
    validate_shape(x, y)?;
    for &yi in y {
        if yi != 0.0 && yi != 1.0 {
            return Err(StatsError::NotBinary(yi));
        }
    }
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == y.len() {
        return Err(StatsError::DegenerateOutcome);
    }

    let rows = x.rows_with_intercept();
    let mu0: Vec<f64> = y.iter().map(|&yi| (yi + 0.5) / 2.0).collect();
    let eta0: Vec<f64> = mu0.iter().map(|&m| (m / (1.0 - m)).ln()).collect();
    let outcome = irls(
        &rows,
        y,
        eta0,
        mu0,
        |m| {
            let m = m.clamp(1e-12, 1.0 - 1e-12);
            m * (1.0 - m)
        },
        binomial_deviance,
        |eta| 1.0 / (1.0 + (-eta).exp()),
        |m| {
            let m = m.clamp(1e-12, 1.0 - 1e-12);
            1.0 / (m * (1.0 - m))
        },
    )
    .map_err(|pivot| singular_error(x, pivot))?;

    let mut converged = outcome.converged;
    let mut diagnostic = None;
    let max_coef = outcome.beta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if max_coef > SEPARATION_COEF_LIMIT && outcome.deviance_shrank_throughout {
        converged = false;
        diagnostic = Some(format!(
            "possible perfect separation: |coefficient| reached {max_coef:.1} with monotonically shrinking deviance"
        ));
    } else if !converged {
        diagnostic = Some(format!(
            "IRLS did not reach tolerance within {IRLS_MAX_ITERATIONS} iterations"
        ));
    }

    let p_bar = ones as f64 / y.len() as f64;
    let null_mu = vec![p_bar; y.len()];
    let null_deviance = binomial_deviance(y, &null_mu);

    let terms = wald_terms(x.term_names(), &outcome.beta, &rows, &outcome.weights, x)?;
    Ok(ModelFit {
        family: Family::BinomialLogit,
        terms,
        null_deviance,
        residual_deviance: outcome.deviance,
        theta: None,
        iterations: outcome.iterations,
        converged,
        diagnostic,
    })
}

fn validate_counts(y: &[f64]) -> Result<(), StatsError> {
    for &yi in y {
        if yi < 0.0 || yi.fract() != 0.0 || !yi.is_finite() {
            return Err(StatsError::NotACount(yi));
        }
    }
    if y.iter().all(|&v| v == 0.0) {
        return Err(StatsError::AllZeroCounts);
    }
    Ok(())
}

fn poisson_irls(rows: &[Vec<f64>], y: &[f64]) -> Result<IrlsOutcome, usize> {
    let mu0: Vec<f64> = y.iter().map(|&yi| yi + 0.5).collect();
    let eta0: Vec<f64> = mu0.iter().map(|&m| m.ln()).collect();
    irls(
        rows,
        y,
        eta0,
        mu0,
        |m| m,
        poisson_deviance,
        |eta| eta.exp().clamp(1e-300, 1e300),
        |m| 1.0 / m.max(1e-12),
    )
}

fn negbin_irls(rows: &[Vec<f64>], y: &[f64], theta: f64, start: &IrlsOutcome) -> Result<IrlsOutcome, usize> {
    let eta0: Vec<f64> = start.mu.iter().map(|&m| m.max(1e-10).ln()).collect();
    irls(
        rows,
        y,
        eta0,
        start.mu.clone(),
        move |m| m / (1.0 + m / theta),
        move |y, mu| negbin_deviance(y, mu, theta),
        |eta| eta.exp().clamp(1e-300, 1e300),
        |m| 1.0 / m.max(1e-12),
    )
}

/// Profile log-likelihood score in theta.
fn theta_score(y: &[f64], mu: &[f64], theta: f64) -> f64 {
    y.iter()
        .zip(mu)
        .map(|(&yi, &mi)| {
            digamma(yi + theta) - digamma(theta) + theta.ln() + 1.0
                - (theta + mi).ln()
                - (yi + theta) / (theta + mi)
        })
        .sum()
}

/// One-dimensional Newton maximization of the profile likelihood in
/// log(theta), with numeric curvature and step clamping.
fn update_theta(y: &[f64], mu: &[f64], theta: f64) -> f64 {
    let mut t = theta.max(1e-8).ln();
    for _ in 0..30 {
        let th = t.exp();
        if th > THETA_DIVERGENCE_LIMIT * 10.0 {
            break;
        }
        let g = theta_score(y, mu, th) * th; // d/dt with t = ln(theta)
        let h = 1e-5;
        let g_hi = theta_score(y, mu, (t + h).exp()) * (t + h).exp();
        let g_lo = theta_score(y, mu, (t - h).exp()) * (t - h).exp();
        let curvature = (g_hi - g_lo) / (2.0 * h);
        let step = if curvature < -1e-12 {
            (g / curvature).clamp(-2.0, 2.0)
        } else {
            // Not locally concave; move uphill a fixed amount.
            -0.5 * g.signum()
        };
        let next = t - step;
        if (next - t).abs() < 1e-10 {
            t = next;
            break;
        }
        t = next;
    }
    t.exp()
}

/// Negative-binomial (NB2) regression with a log link.
///
/// Alternates IRLS for the coefficients given theta with Newton updates
/// of theta on the profile likelihood, until the joint relative change
/// falls below 1e-8 (at most 100 outer rounds). Theta starts from a
/// method-of-moments estimate on the Poisson residuals. A diverging
/// theta (> 1e6) falls back to the Poisson fit, flagged in the
/// diagnostic.
pub fn fit_negbin(x: &DesignMatrix, y: &[f64]) -> Result<ModelFit, StatsError> {
    validate_shape(x, y)?;
    validate_counts(y)?;
    let rows = x.rows_with_intercept();

    let poisson = poisson_irls(&rows, y).map_err(|pivot| singular_error(x, pivot))?;

    // Method-of-moments start for the dispersion.
    let num: f64 = poisson.mu.iter().map(|&m| m * m).sum();
    let den: f64 = y.iter().zip(&poisson.mu).map(|(&yi, &mi)| (yi - mi).powi(2) - mi).sum();
    let mut theta = if den > 0.0 { (num / den).clamp(1e-2, 1e5) } else { 1e5 };

    let mut current = poisson;
    let mut total_iterations = current.iterations;
    let mut converged = false;
    for _ in 0..NEGBIN_MAX_OUTER_ITERATIONS {
        let fit = negbin_irls(&rows, y, theta, &current)
            .map_err(|pivot| singular_error(x, pivot))?;
        total_iterations += fit.iterations;
        let new_theta = update_theta(y, &fit.mu, theta);
        let beta_change = fit
            .beta
            .iter()
            .zip(&current.beta)
            .map(|(n, o)| (n - o).abs() / (1.0 + o.abs()))
            .fold(0.0f64, f64::max);
        let theta_change = (new_theta - theta).abs() / (1.0 + theta.abs());
        current = fit;
        theta = new_theta;
        if theta > THETA_DIVERGENCE_LIMIT {
            break;
        }
        if beta_change.max(theta_change) < IRLS_TOLERANCE {
            converged = true;
            break;
        }
    }

    if theta > THETA_DIVERGENCE_LIMIT {
        // Effectively Poisson: report the Poisson fit, flagged.
        let poisson = poisson_irls(&rows, y).map_err(|pivot| singular_error(x, pivot))?;
        let y_bar = y.iter().sum::<f64>() / y.len() as f64;
        let null_deviance = poisson_deviance(y, &vec![y_bar; y.len()]);
        let terms = wald_terms(x.term_names(), &poisson.beta, &rows, &poisson.weights, x)?;
        return Ok(ModelFit {
            family: Family::NegBinomial,
            terms,
            null_deviance,
            residual_deviance: poisson.deviance,
            theta: None,
            iterations: total_iterations,
            converged: poisson.converged,
            diagnostic: Some(format!(
                "dispersion diverged (theta > {THETA_DIVERGENCE_LIMIT:.0}); Poisson fit reported"
            )),
        });
    }

    let y_bar = y.iter().sum::<f64>() / y.len() as f64;
    let null_deviance = negbin_deviance(y, &vec![y_bar; y.len()], theta);
    let terms = wald_terms(x.term_names(), &current.beta, &rows, &current.weights, x)?;
    Ok(ModelFit {
        family: Family::NegBinomial,
        terms,
        null_deviance,
        residual_deviance: current.deviance,
        theta: Some(theta),
        iterations: total_iterations,
        converged: converged && current.converged,
        diagnostic: if converged { None } else { Some("outer (beta, theta) loop hit its iteration cap".into()) },
    })
}

/// Negative-binomial fit with the dispersion held fixed; the sequential
/// ANOVA uses this so nested deviances share one theta.
pub(crate) fn fit_negbin_fixed_theta(
    x: &DesignMatrix,
    y: &[f64],
    theta: f64,
) -> Result<ModelFit, StatsError> {
    validate_shape(x, y)?;
    validate_counts(y)?;
    let rows = x.rows_with_intercept();
    let poisson = poisson_irls(&rows, y).map_err(|pivot| singular_error(x, pivot))?;
    let fit = negbin_irls(&rows, y, theta, &poisson).map_err(|pivot| singular_error(x, pivot))?;
    let y_bar = y.iter().sum::<f64>() / y.len() as f64;
    let null_deviance = negbin_deviance(y, &vec![y_bar; y.len()], theta);
    let terms = wald_terms(x.term_names(), &fit.beta, &rows, &fit.weights, x)?;
    Ok(ModelFit {
        family: Family::NegBinomial,
        terms,
        null_deviance,
        residual_deviance: fit.deviance,
        theta: Some(theta),
        iterations: fit.iterations,
        converged: fit.converged,
        diagnostic: None,
    })
}

/// Poisson fit used by the ANOVA when the full model fell back from a
/// diverging dispersion.
pub(crate) fn fit_poisson(x: &DesignMatrix, y: &[f64]) -> Result<ModelFit, StatsError> {
    validate_shape(x, y)?;
    validate_counts(y)?;
    let rows = x.rows_with_intercept();
    let fit = poisson_irls(&rows, y).map_err(|pivot| singular_error(x, pivot))?;
    let y_bar = y.iter().sum::<f64>() / y.len() as f64;
    let null_deviance = poisson_deviance(y, &vec![y_bar; y.len()]);
    let terms = wald_terms(x.term_names(), &fit.beta, &rows, &fit.weights, x)?;
    Ok(ModelFit {
        family: Family::NegBinomial,
        terms,
        null_deviance,
        residual_deviance: fit.deviance,
        theta: None,
        iterations: fit.iterations,
        converged: fit.converged,
        diagnostic: None,
    })
}

/// One predictor's odds ratio with its 95% confidence interval.
#[derive(Debug, Clone, PartialEq)]
pub struct OddsRatioEntry {
    pub term: String,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Odds ratios for every non-intercept predictor of a logistic fit.
#[derive(Debug, Clone, PartialEq)]
pub struct OddsRatioReport {
    pub entries: Vec<OddsRatioEntry>,
}

/// exp(beta) per predictor with exp(beta +/- 1.96 se) bounds.
pub fn odds_ratios(fit: &ModelFit) -> Result<OddsRatioReport, StatsError> {
    if fit.family != Family::BinomialLogit {
        return Err(StatsError::NotLogistic(fit.family.as_str().to_string()));
    }
    if !fit.converged {
        return Err(StatsError::NotConverged(
            fit.diagnostic.clone().unwrap_or_else(|| "logistic fit not converged".into()),
        ));
    }
    let entries = fit
        .terms
        .iter()
        .skip(1)
        .map(|t| OddsRatioEntry {
            term: t.name.clone(),
            point: t.estimate.exp(),
            ci_low: (t.estimate - 1.96 * t.std_error).exp(),
            ci_high: (t.estimate + 1.96 * t.std_error).exp(),
        })
        .collect();
    Ok(OddsRatioReport { entries })
}
