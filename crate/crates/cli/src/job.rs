//! Executes a validated job and writes its reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use arrstab_core::arrangement::{normalize, orbit_decomposition, primitive_classes};
use arrstab_core::characters::{
    character_from_lattice, fit_character_polynomial, invariants_dim, stability_report,
    twisted_betti, verify_free_decomposition, CharacterPolynomial, ClassFunction, StabilityReport,
};
use arrstab_core::exactlin::format_rational;
use arrstab_core::fim::{degree_add, degree_times};
use arrstab_core::homology::gm_betti;
use arrstab_core::{par, Error, IntersectionLattice, MultiIndex, Rational};
use log::info;
use serde_json::{json, Value};

use crate::cache::LatticeCache;
use crate::config::{JobConfig, Output};

#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

/// What a finished job produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Falsification findings; nonempty means exit status 2.
    pub findings: Vec<String>,
    /// Human-readable summary lines for stdout.
    pub summary: Vec<String>,
}

/// Everything computed at one level.
struct LevelData {
    level: MultiIndex,
    betti: Vec<usize>,
    characters: Vec<ClassFunction>,
}

fn rational_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

fn level_data(
    job: &JobConfig,
    lat: Option<&IntersectionLattice>,
    level: &MultiIndex,
    with_characters: bool,
) -> Result<LevelData, Error> {
    let mut betti = vec![1];
    let mut characters = vec![];
    if with_characters {
        characters.push(ClassFunction::constant(level, Rational::from_integer(1.into())));
    }
    if let Some(lat) = lat {
        for i in 1..=job.i_max {
            betti.push(gm_betti(lat, i)?.total);
            if with_characters {
                characters.push(character_from_lattice(lat, i)?);
            }
        }
    }
    Ok(LevelData {
        level: level.clone(),
        betti,
        characters,
    })
}

pub fn run_job(job: &JobConfig, cache: &LatticeCache, out: &Path) -> Result<Outcome, JobError> {
    std::fs::create_dir_all(out).map_err(|e| JobError::Write {
        path: out.to_owned(),
        source: Box::new(e),
    })?;
    let mut outcome = Outcome::default();
    let mut sidecar = BTreeMap::<&str, Value>::new();
    sidecar.insert("spec", json!(job.spec.serialize()));
    sidecar.insert(
        "levels",
        json!(job.levels.iter().map(MultiIndex::render).collect::<Vec<_>>()),
    );
    sidecar.insert("i_max", json!(job.i_max));

    let needs_lattices = [
        Output::Betti,
        Output::Characters,
        Output::Fit,
        Output::Stability,
        Output::Twisted,
        Output::Freeness,
    ]
    .iter()
    .any(|o| job.wants(*o));
    let with_characters = [Output::Characters, Output::Fit, Output::Stability, Output::Twisted]
        .iter()
        .any(|o| job.wants(*o));
    let max_codim = job.i_max.max(1);

    let lattices: Vec<Option<IntersectionLattice>> = if needs_lattices && job.i_max > 0 {
        par::try_map(&job.levels, |n| {
            cache.get_or_build(&job.spec, n, max_codim).map(|(lat, status)| {
                info!("level {n}: {} elements ({status:?})", lat.len());
                Some(lat)
            })
        })?
    } else {
        job.levels.iter().map(|_| None).collect()
    };
    let data: Vec<LevelData> = if needs_lattices {
        let pairs: Vec<_> = job.levels.iter().zip(&lattices).collect();
        par::try_map(&pairs, |(n, lat)| level_data(job, lat.as_ref(), n, with_characters))?
    } else {
        Vec::new()
    };

    if job.wants(Output::Betti) {
        let mut header = vec!["n".to_string()];
        header.extend((0..=job.i_max).map(|i| format!("b{i}")));
        let rows = data.iter().map(|d| {
            std::iter::once(d.level.render())
                .chain(d.betti.iter().map(usize::to_string))
                .collect()
        });
        write_csv(out, "betti.csv", &header, rows, &mut outcome)?;
    }

    if job.wants(Output::Characters) {
        let header = ["n", "i", "class", "class_size", "value"].map(String::from);
        let mut rows = Vec::new();
        for d in &data {
            for (i, chi) in d.characters.iter().enumerate() {
                for (c, v) in chi.iter() {
                    rows.push(vec![
                        d.level.render(),
                        i.to_string(),
                        c.render(),
                        c.size().to_string(),
                        format_rational(v),
                    ]);
                }
            }
        }
        write_csv(out, "characters.csv", &header, rows, &mut outcome)?;
    }

    if job.wants(Output::Fit) {
        sidecar.insert("fits", fits(job, &data, &mut outcome));
    }

    if job.wants(Output::Stability) {
        let mut rows = Vec::new();
        let mut values_json = Vec::new();
        for i in 0..=job.i_max {
            let mut values = BTreeMap::new();
            for d in &data {
                values.insert(d.level.clone(), invariants_dim(&d.characters[i])?);
            }
            let predicted = degree_times(i, &job.spec.max_degree());
            let report = stability_report(&values, &predicted);
            stability_row("invariants", i, &report, &mut rows, &mut outcome);
            values_json.push(json!({
                "i": i,
                "values": values.iter().map(|(n, v)| (n.render(), rational_json(v))).collect::<BTreeMap<_, _>>(),
            }));
        }
        sidecar.insert("invariants", Value::Array(values_json));
        let header = [
            "quantity",
            "i",
            "predicted_onset",
            "empirical_onset",
            "stable_value",
            "prediction_holds",
        ]
        .map(String::from);
        write_csv(out, "stability.csv", &header, rows, &mut outcome)?;
    }

    if job.wants(Output::Twisted) {
        let poly = job.twisted.as_ref().expect("validated");
        twisted(job, poly, &data, out, &mut sidecar, &mut outcome)?;
    }

    if job.wants(Output::Freeness) {
        sidecar.insert("freeness", freeness(job, &mut outcome)?);
        let classes = primitive_classes(&job.spec, max_codim)?;
        let mut decompositions = Vec::new();
        for lat in lattices.iter().flatten() {
            let dec = orbit_decomposition(lat, &classes)?;
            let blocks: Vec<Value> = dec
                .blocks
                .iter()
                .map(|b| {
                    let class = &classes[b.class];
                    json!({
                        "degree": class.degree.render(),
                        "subspace": class.subspace.serialize(),
                        "binomial_classes": b.binomial_classes.len(),
                        "elements": b.len(),
                    })
                })
                .collect();
            decompositions.push(json!({ "level": lat.level().render(), "blocks": blocks }));
        }
        sidecar.insert("orbit_decompositions", Value::Array(decompositions));
    }

    if job.wants(Output::Normalize) {
        let normal = normalize(&job.spec)?;
        let pairs: Vec<Value> = job
            .spec
            .generators()
            .iter()
            .map(|g| {
                let single = arrstab_core::ArrangementSpec::new(job.spec.m(), job.spec.r(), vec![g.clone()])?;
                let n = normalize(&single)?;
                let after = &n.generators()[0];
                Ok(json!({
                    "before": format!("{}@{}", g.degree.render(), g.subspace.serialize()),
                    "after": format!("{}@{}", after.degree.render(), after.subspace.serialize()),
                }))
            })
            .collect::<Result<_, Error>>()?;
        let changed = normal != job.spec;
        outcome.summary.push(format!("normalized: {}", normal.serialize()));
        sidecar.insert(
            "normalization",
            json!({
                "input": job.spec.serialize(),
                "normalized": normal.serialize(),
                "changed": changed,
                "generators": pairs,
            }),
        );
    }

    sidecar.insert("findings", json!(outcome.findings));
    let path = out.join("report.json");
    let mut text = serde_json::to_string_pretty(&sidecar).expect("json values serialize");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| JobError::Write {
        path: path.clone(),
        source: Box::new(e),
    })?;
    outcome.files.push(path);
    Ok(outcome)
}

fn write_csv(
    out: &Path,
    name: &str,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
    outcome: &mut Outcome,
) -> Result<(), JobError> {
    let path = out.join(name);
    let wrap = |e: csv::Error| JobError::Write {
        path: path.clone(),
        source: Box::new(e),
    };
    let mut w = csv::Writer::from_path(&path).map_err(wrap)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(|e| JobError::Write {
        path: path.clone(),
        source: Box::new(e),
    })?;
    outcome.files.push(path);
    Ok(())
}

fn stability_row(
    quantity: &str,
    i: usize,
    report: &StabilityReport,
    rows: &mut Vec<Vec<String>>,
    outcome: &mut Outcome,
) {
    if !report.prediction_holds {
        outcome.findings.push(format!(
            "{quantity} of H^{i}: not constant from the predicted onset {}",
            report.predicted_onset
        ));
    }
    rows.push(vec![
        quantity.to_string(),
        i.to_string(),
        report.predicted_onset.render(),
        report.onset.as_ref().map(MultiIndex::render).unwrap_or_default(),
        report.stable_value.as_ref().map(format_rational).unwrap_or_default(),
        report.prediction_holds.to_string(),
    ]);
}

fn fits(job: &JobConfig, data: &[LevelData], outcome: &mut Outcome) -> Value {
    let mut entries = Vec::new();
    for i in 0..=job.i_max {
        let bound = job
            .fit_bound
            .clone()
            .unwrap_or_else(|| degree_times(i, &job.spec.max_degree()));
        let samples: Vec<ClassFunction> = data
            .iter()
            .filter(|d| bound.le(&d.level))
            .map(|d| d.characters[i].clone())
            .collect();
        let levels: Vec<String> = samples.iter().map(|s| s.level().render()).collect();
        let mut entry = json!({ "i": i, "bound": bound.render(), "sample_levels": levels });
        match fit_character_polynomial(&samples, &bound) {
            Ok(p) => {
                outcome.summary.push(format!("H^{i}: {p}"));
                entry["status"] = json!("fitted");
                entry["polynomial"] = json!(p.to_string());
                entry["binomial_form"] = json!(p.to_binomial_string());
                entry["multidegree"] = json!(p.multidegree(job.spec.m()).render());
            }
            Err(e) => {
                let status = match e {
                    Error::FitInconsistent(_) => {
                        outcome
                            .findings
                            .push(format!("H^{i}: no character polynomial of degree <= {bound} fits"));
                        "inconsistent"
                    }
                    Error::FitUnderdetermined { .. } => "underdetermined",
                    _ => "insufficient-samples",
                };
                outcome.summary.push(format!("H^{i}: fit {status} ({e})"));
                entry["status"] = json!(status);
                entry["detail"] = json!(e.to_string());
            }
        }
        entries.push(entry);
    }
    Value::Array(entries)
}

fn twisted(
    job: &JobConfig,
    poly: &CharacterPolynomial,
    data: &[LevelData],
    out: &Path,
    sidecar: &mut BTreeMap<&str, Value>,
    outcome: &mut Outcome,
) -> Result<(), JobError> {
    let m = job.spec.m();
    let shift = poly.multidegree(m);
    let mut value_rows = Vec::new();
    let mut onset_rows = Vec::new();
    for i in 0..=job.i_max {
        let mut values = BTreeMap::new();
        for d in data {
            let v = twisted_betti(&d.characters[i], &poly.on_level(&d.level))?;
            value_rows.push(vec![d.level.render(), i.to_string(), format_rational(&v)]);
            values.insert(d.level.clone(), v);
        }
        let predicted = degree_add(&degree_times(i, &job.spec.max_degree()), &shift)?;
        stability_row("twisted", i, &stability_report(&values, &predicted), &mut onset_rows, outcome);
    }
    let header = ["n", "i", "value"].map(String::from);
    write_csv(out, "twisted.csv", &header, value_rows, outcome)?;
    let header = [
        "quantity",
        "i",
        "predicted_onset",
        "empirical_onset",
        "stable_value",
        "prediction_holds",
    ]
    .map(String::from);
    write_csv(out, "twisted_stability.csv", &header, onset_rows, outcome)?;
    sidecar.insert("twisted_coefficients", json!(poly.to_string()));
    Ok(())
}

fn freeness(job: &JobConfig, outcome: &mut Outcome) -> Result<Value, JobError> {
    let mut entries = Vec::new();
    for i in 1..=job.i_max {
        let report = verify_free_decomposition(&job.spec, i, &job.levels)?;
        let mismatches: Vec<String> = report
            .levels
            .iter()
            .filter(|l| !l.matches())
            .map(|l| l.level.render())
            .collect();
        if !report.degrees_within_bound() {
            outcome.findings.push(format!(
                "H^{i}: a generator lies outside the degree bound {}",
                report.degree_bound
            ));
        }
        if !mismatches.is_empty() {
            outcome.findings.push(format!(
                "H^{i}: free decomposition disagrees at {}",
                mismatches.join(", ")
            ));
        }
        let generators: Vec<Value> = report
            .generators
            .iter()
            .map(|g| {
                json!({
                    "degree": g.class.degree.render(),
                    "subspace": g.class.subspace.serialize(),
                    "codim": g.class.codim(),
                    "stabilizer_order": g.class.stabilizer_order.to_string(),
                    "local_betti": g.local_betti,
                    "character": g.character.iter().map(|(c, v)| (c.render(), rational_json(v))).collect::<BTreeMap<_, _>>(),
                })
            })
            .collect();
        entries.push(json!({
            "i": i,
            "passed": report.passed(),
            "degree_bound": report.degree_bound.render(),
            "generators": generators,
            "mismatched_levels": mismatches,
        }));
    }
    Ok(Value::Array(entries))
}
