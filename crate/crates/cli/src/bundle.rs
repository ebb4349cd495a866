//! Output bundles: a directory of JSON and CSV files written atomically.
//!
//! Every file is first written to a sibling staging directory, which is
//! renamed onto the output path once complete. A failed run leaves no
//! output directory behind.

use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::experiment::{Command, Report};
use crate::format::fmt_f64;
use crate::table_io::encode_table;

pub struct BundleFile {
    pub name: String,
    pub contents: Vec<u8>,
}

struct Csv(csv::Writer<Vec<u8>>);

impl Csv {
    fn new<const N: usize>(header: [&str; N]) -> Self {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        Csv(w)
    }

    fn row(&mut self, fields: Vec<String>) {
        self.0.write_record(&fields).expect("in-memory write");
    }

    fn finish(self, name: &str) -> BundleFile {
        BundleFile {
            name: name.to_string(),
            contents: self.0.into_inner().expect("in-memory flush"),
        }
    }
}

fn truth(t: &Option<String>) -> String {
    t.clone().unwrap_or_default()
}

/// Files making up the bundle of `report`, in a fixed order.
pub fn bundle_files(report: &Report) -> Vec<BundleFile> {
    let mut files = Vec::new();
    let mut json = serde_json::to_vec_pretty(report).expect("report serializes");
    json.push(b'\n');
    files.push(BundleFile {
        name: "bundle.json".into(),
        contents: json,
    });
    if report.kind == Command::Simulate || report.config.table.save {
        let (csv, meta) = encode_table(&report.reference);
        files.push(BundleFile {
            name: "table.csv".into(),
            contents: csv,
        });
        files.push(BundleFile {
            name: "table.meta.json".into(),
            contents: meta,
        });
    }
    let obs = &report.observations;
    if obs.is_empty() {
        return files;
    }

    let stats = &report.table.stat_names;
    let mut header = vec!["replicate".to_string(), "truth".to_string()];
    header.extend(stats.iter().cloned());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for o in obs {
        let mut r = vec![o.replicate.to_string(), truth(&o.truth)];
        r.extend(o.observed.values().iter().map(|&v| fmt_f64(v)));
        w.write_record(&r).expect("in-memory write");
    }
    files.push(BundleFile {
        name: "observed.csv".into(),
        contents: w.into_inner().expect("in-memory flush"),
    });

    if obs.iter().any(|o| o.candidates.iter().any(|c| !c.dic.is_empty())) {
        let mut dic = Csv::new([
            "replicate", "truth", "candidate", "variant", "aggregation", "dBar", "dHat", "pD", "dic", "selected",
        ]);
        for o in obs {
            for c in &o.candidates {
                for d in &c.dic {
                    let winners = o.winners(&format!("dic{}", d.variant)).unwrap_or(&[]);
                    dic.row(vec![
                        o.replicate.to_string(),
                        truth(&o.truth),
                        c.label.clone(),
                        d.variant.to_string(),
                        serde_json::to_value(d.aggregation).expect("serializes").as_str().unwrap_or("").to_string(),
                        fmt_f64(d.d_bar),
                        fmt_f64(d.d_hat),
                        fmt_f64(d.p_d),
                        fmt_f64(d.dic),
                        winners.contains(&c.label).to_string(),
                    ]);
                }
            }
        }
        files.push(dic.finish("dic.csv"));

        let mut grid = Csv::new(["truth", "candidate", "variant", "replicates", "meanDic", "sdDic", "meanDBar", "meanPD"]);
        for r in &report.dic_summary {
            grid.row(vec![
                r.truth.clone(),
                r.candidate.clone(),
                r.variant.to_string(),
                r.replicates.to_string(),
                fmt_f64(r.mean_dic),
                fmt_f64(r.sd_dic),
                fmt_f64(r.mean_d_bar),
                fmt_f64(r.mean_p_d),
            ]);
        }
        files.push(grid.finish("dic_summary.csv"));
    }

    if !report.selection.is_empty() {
        let mut sel = Csv::new(["truth", "criterion", "candidate", "wins", "replicates", "frequency", "ties"]);
        for r in &report.selection {
            sel.row(vec![
                r.truth.clone(),
                r.criterion.clone(),
                r.candidate.clone(),
                fmt_f64(r.wins),
                r.replicates.to_string(),
                fmt_f64(r.frequency),
                r.ties.to_string(),
            ]);
        }
        files.push(sel.finish("selection.csv"));
    }

    if obs.iter().any(|o| !o.model_probs.is_empty()) {
        let mut mp = Csv::new(["replicate", "truth", "method", "candidate", "accepted", "probability"]);
        for o in obs {
            for p in &o.model_probs {
                let method = serde_json::to_value(p.method).expect("serializes");
                for (k, label) in p.labels.iter().enumerate() {
                    mp.row(vec![
                        o.replicate.to_string(),
                        truth(&o.truth),
                        method.as_str().unwrap_or("").to_string(),
                        label.clone(),
                        p.accepted[k].to_string(),
                        fmt_f64(p.probs[k]),
                    ]);
                }
            }
        }
        files.push(mp.finish("modelprob.csv"));
    }

    if obs.iter().any(|o| o.candidates.iter().any(|c| c.predictive.is_some())) {
        let mut pc = Csv::new(["replicate", "truth", "candidate", "stat", "observed", "quantile", "tailProb"]);
        for o in obs {
            for c in &o.candidates {
                let Some(check) = &c.predictive else { continue };
                for r in &check.rows {
                    pc.row(vec![
                        o.replicate.to_string(),
                        truth(&o.truth),
                        c.label.clone(),
                        r.stat.clone(),
                        fmt_f64(r.observed),
                        fmt_f64(r.quantile),
                        fmt_f64(r.tail_prob),
                    ]);
                }
            }
        }
        files.push(pc.finish("predictive.csv"));
    }

    if obs.iter().any(|o| o.candidates.iter().any(|c| c.posterior.is_some())) {
        let mut post = Csv::new([
            "replicate", "truth", "candidate", "row", "weight", "distance", "param", "value", "adjusted",
        ]);
        for o in obs {
            for c in &o.candidates {
                let Some(sample) = &c.posterior else { continue };
                let names = &sample.single_layout().expect("per-model sample").param_names;
                for r in &sample.rows {
                    for (k, name) in names.iter().enumerate() {
                        post.row(vec![
                            o.replicate.to_string(),
                            truth(&o.truth),
                            c.label.clone(),
                            r.row.to_string(),
                            fmt_f64(r.weight),
                            fmt_f64(r.distance),
                            name.clone(),
                            fmt_f64(r.theta[k]),
                            fmt_f64(r.theta_adj[k]),
                        ]);
                    }
                }
            }
        }
        files.push(post.finish("posterior.csv"));
    }

    if report.kind == Command::Scan {
        let mut scan = Csv::new(["candidate", "priors", "variant", "replicates", "meanDBar", "meanPD", "meanDic", "sdDic"]);
        for r in &report.dic_summary {
            let entry = report.config.models.iter().find(|m| m.label() == r.candidate);
            let priors = entry.map(|m| serde_json::to_string(&m.priors).expect("serializes")).unwrap_or_default();
            scan.row(vec![
                r.candidate.clone(),
                priors,
                r.variant.to_string(),
                r.replicates.to_string(),
                fmt_f64(r.mean_d_bar),
                fmt_f64(r.mean_p_d),
                fmt_f64(r.mean_dic),
                fmt_f64(r.sd_dic),
            ]);
        }
        files.push(scan.finish("scan.csv"));
    }
    files
}

fn is_empty_dir(path: &Path) -> CliResult<bool> {
    let mut entries = fs::read_dir(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    Ok(entries.next().is_none())
}

/// Write `files` into directory `out`, replacing an existing bundle only
/// with `force`.
pub fn write_bundle(out: &Path, files: &[BundleFile], force: bool) -> CliResult<()> {
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => ".".into(),
    };
    fs::create_dir_all(&parent).map_err(|e| CliError::io(format!("creating {}", parent.display()), e))?;
    let existing = out.exists();
    if existing {
        if !out.is_dir() {
            return Err(CliError::io(
                format!("output {}", out.display()),
                std::io::Error::new(std::io::ErrorKind::AlreadyExists, "exists and is not a directory"),
            ));
        }
        if !force && !is_empty_dir(out)? {
            return Err(CliError::io(
                format!("output {}", out.display()),
                std::io::Error::new(std::io::ErrorKind::AlreadyExists, "directory is not empty (use --force to replace it)"),
            ));
        }
    }
    let stage = tempfile::Builder::new()
        .prefix(".abcdic-stage-")
        .tempdir_in(&parent)
        .map_err(|e| CliError::io(format!("staging in {}", parent.display()), e))?;
    for f in files {
        let p = stage.path().join(&f.name);
        fs::write(&p, &f.contents).map_err(|e| CliError::io(format!("writing {}", p.display()), e))?;
    }
    // the replaced bundle goes into a second temporary directory and is
    // removed when that is dropped
    let trash = if existing {
        let trash = tempfile::Builder::new()
            .prefix(".abcdic-old-")
            .tempdir_in(&parent)
            .map_err(|e| CliError::io(format!("staging in {}", parent.display()), e))?;
        fs::rename(out, trash.path().join("old"))
            .map_err(|e| CliError::io(format!("moving aside {}", out.display()), e))?;
        Some(trash)
    } else {
        None
    };
    fs::rename(stage.path(), out).map_err(|e| CliError::io(format!("promoting bundle to {}", out.display()), e))?;
    drop(trash);
    Ok(())
}
