//! Text renderings of fitted models: a machine-readable CSV and a
//! human-readable coefficient table with significance stars.

use super::glm::ModelFit;

/// Significance stars at the 0.1 / 0.05 / 0.01 levels.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

/// `term,estimate,std_error,z,p` rows in term order.
pub fn coefficient_csv(fit: &ModelFit) -> String {
    let mut out = String::from("term,estimate,std_error,z,p\n");
    for t in &fit.terms {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.4},{:.6}\n",
            t.name, t.estimate, t.std_error, t.z_value, t.p_value
        ));
    }
    out
}

/// Side-by-side coefficient table for one or more models: estimate with
/// stars, standard error in parentheses below, deviances and dispersion
/// in the footer.
pub fn model_table(fits: &[(&str, &ModelFit)]) -> String {
    const TERM_WIDTH: usize = 24;
    const COL_WIDTH: usize = 20;
    let mut out = String::new();
    out.push_str(&format!("{:<TERM_WIDTH$}", "Predictor"));
    for (name, _) in fits {
        out.push_str(&format!("{name:>COL_WIDTH$}"));
    }
    out.push('\n');
    out.push_str(&"-".repeat(TERM_WIDTH + COL_WIDTH * fits.len()));
    out.push('\n');

    let mut term_names: Vec<&str> = Vec::new();
    for (_, fit) in fits {
        for t in &fit.terms {
            if !term_names.contains(&t.name.as_str()) {
                term_names.push(&t.name);
            }
        }
    }
    // Intercept conventionally last, as in the published model tables.
    term_names.sort_by_key(|n| *n == "(Intercept)");

    for name in term_names {
        out.push_str(&format!("{name:<TERM_WIDTH$}"));
        for (_, fit) in fits {
            match fit.terms.iter().find(|t| t.name == name) {
                Some(t) => out.push_str(&format!(
                    "{:>COL_WIDTH$}",
                    format!("{:.3}{}", t.estimate, significance_stars(t.p_value))
                )),
                None => out.push_str(&format!("{:>COL_WIDTH$}", "")),
            }
        }
        out.push('\n');
        out.push_str(&format!("{:<TERM_WIDTH$}", ""));
        for (_, fit) in fits {
            match fit.terms.iter().find(|t| t.name == name) {
                Some(t) => out
                    .push_str(&format!("{:>COL_WIDTH$}", format!("({:.3})", t.std_error))),
                None => out.push_str(&format!("{:>COL_WIDTH$}", "")),
            }
        }
        out.push('\n');
    }

    out.push_str(&"-".repeat(TERM_WIDTH + COL_WIDTH * fits.len()));
    out.push('\n');
    out.push_str(&format!("{:<TERM_WIDTH$}", "Null deviance"));
    for (_, fit) in fits {
        out.push_str(&format!("{:>COL_WIDTH$}", format!("{:.2}", fit.null_deviance)));
    }
    out.push('\n');
    out.push_str(&format!("{:<TERM_WIDTH$}", "Residual deviance"));
    for (_, fit) in fits {
        out.push_str(&format!("{:>COL_WIDTH$}", format!("{:.2}", fit.residual_deviance)));
    }
    out.push('\n');
    out.push_str(&format!("{:<TERM_WIDTH$}", "Theta"));
    for (_, fit) in fits {
        let cell = match fit.theta {
            Some(t) => format!("{t:.3}"),
            None => "-".to_string(),
        };
        out.push_str(&format!("{cell:>COL_WIDTH$}"));
    }
    out.push('\n');
    out.push_str("Note: *p<0.1; **p<0.05; ***p<0.01\n");
    out
}
