//! Command implementations behind the `troptree` binary.
//!
//! Each command reads files, calls into the library, and renders one of the
//! three output formats.  Exit codes are uniform across commands: 0 for
//! success (valid input, member found, all checks green), 1 for a semantic
//! negative (not an ultrametric, not a member, a failed repro check), and 2
//! for input errors, which the binary maps from `Err` returns.

use std::fmt::Write as _;
use std::path::Path;

use crate::compat::{compatibility_set, decide_membership, necessary_condition};
use crate::error::{Error, Result};
use crate::io::{self, CompatFile, SegmentFile, VectorFile};
use crate::segment::{
    check_equivariance, contains_origin, segment_to_dot, segment_topologies, tropical_segment,
    LambdaInterval,
};
use crate::topology::{enumerate_topologies, topology_of, topology_to_dot, Topology};
use crate::torus::{LeafPermutation, PairVector, DEFAULT_TOL};
use crate::treemetrics::{
    is_tree_metric, is_ultrametric, parse_newick, random_coalescent_tree, tree_to_vector,
    vector_to_tree, write_newick, MetricKind,
};

/// Output rendering selected with `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Dot,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tolerance: f64,
    pub normalize: bool,
    pub format: OutputFormat,
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOL,
            normalize: false,
            format: OutputFormat::Text,
            seed: None,
        }
    }
}

impl RunConfig {
    pub fn validated(self) -> Result<Self> {
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::UnrecognizedInput(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(self)
    }
}

/// What a command produced: text for stdout plus the process exit code.
#[derive(Debug)]
pub struct CmdOutput {
    pub text: String,
    pub exit_code: i32,
}

impl CmdOutput {
    fn ok(text: String) -> Self {
        Self { text, exit_code: 0 }
    }

    fn negative(text: String) -> Self {
        Self { text, exit_code: 1 }
    }
}

/// `validate`: classify an input as ultrametric, tree metric, or neither.
pub fn cmd_validate(path: &Path, cfg: &RunConfig) -> Result<CmdOutput> {
    let input = io::read_tree_input(path)?;
    let tree_metric = is_tree_metric(&input.vector, cfg.tolerance);
    let ultrametric = is_ultrametric(&input.vector, cfg.tolerance);
    let text = match cfg.format {
        OutputFormat::Json => serde_json::to_string_pretty(&serde_json::json!({
            "leaf_count": input.vector.leaf_count(),
            "tree_metric": tree_metric,
            "ultrametric": ultrametric,
        }))?,
        _ => match (tree_metric.kind, ultrametric.kind) {
            (_, MetricKind::Ultrametric) => "ultrametric".to_string(),
            // The four-point condition is vacuous below four leaves.
            (MetricKind::TreeMetric, _) if input.vector.leaf_count() >= 4 => format!(
                "tree metric, not ultrametric (witness triple {:?})",
                ultrametric.witness.clone().unwrap_or_default()
            ),
            _ => format!(
                "neither (three-point witness {:?})",
                ultrametric.witness.clone().unwrap_or_default()
            ),
        },
    };
    Ok(if ultrametric.kind == MetricKind::Ultrametric {
        CmdOutput::ok(text)
    } else {
        CmdOutput::negative(text)
    })
}

/// `segment`: the tropical line segment walked from the first input to the
/// second, with bending points, λ values, and the topology itinerary.
pub fn cmd_segment(from: &Path, to: &Path, cfg: &RunConfig, verify: bool) -> Result<CmdOutput> {
    let start = io::read_tree_input(from)?;
    let end = io::read_tree_input(to)?;
    // The walk runs from `start` (smallest λ) to `end` (largest λ).
    let seg = tropical_segment(&end.vector, &start.vector)?;
    let bend_points = if cfg.normalize {
        seg.normalized_bend_points(2.0)
    } else {
        seg.bend_points()
    };
    let topologies = segment_topologies(&seg, cfg.tolerance)?;

    let mut all_ultrametric = true;
    if verify {
        for point in &bend_points {
            if is_ultrametric(point, cfg.tolerance).kind != MetricKind::Ultrametric {
                all_ultrametric = false;
            }
        }
    }

    let text = match cfg.format {
        OutputFormat::Json => serde_json::to_string_pretty(&SegmentFile::new(
            &seg,
            &bend_points,
            topologies,
            verify.then_some(all_ultrametric),
        ))?,
        OutputFormat::Dot => segment_to_dot(&seg, cfg.tolerance)?,
        OutputFormat::Text => {
            let mut out = String::new();
            writeln!(out, "bending points: {}", seg.bend_count()).unwrap();
            for entry in &topologies {
                match entry.interval {
                    LambdaInterval::At(l) => {
                        let k = seg.lambdas().iter().position(|&x| x == l).unwrap();
                        writeln!(
                            out,
                            "lambda = {l}: {} topology {}",
                            bend_points[k], entry.topology
                        )
                        .unwrap();
                    }
                    LambdaInterval::Between(a, b) => {
                        writeln!(out, "open ({a}, {b}): topology {}", entry.topology).unwrap();
                    }
                }
            }
            if verify {
                writeln!(
                    out,
                    "verify: bending points {} the three-point condition",
                    if all_ultrametric { "all pass" } else { "FAIL" }
                )
                .unwrap();
            }
            out.trim_end().to_string()
        }
    };
    Ok(if all_ultrametric {
        CmdOutput::ok(text)
    } else {
        CmdOutput::negative(text)
    })
}

/// `topologies`: the clade family of a single tree or vector input.
pub fn cmd_topologies(path: &Path, cfg: &RunConfig) -> Result<CmdOutput> {
    let input = io::read_tree_input(path)?;
    let topology = topology_of(&input.vector, cfg.tolerance)?;
    let text = match cfg.format {
        OutputFormat::Json => serde_json::to_string_pretty(&topology)?,
        OutputFormat::Dot => topology_to_dot(&topology),
        OutputFormat::Text => format!("{topology}"),
    };
    Ok(CmdOutput::ok(text))
}

/// `compatible`: with two topology files, the full compatibility set; with
/// a third candidate file, a single membership decision (or only the
/// necessary-condition check under `--necessary-only`).
pub fn cmd_compatible(
    f1_path: &Path,
    f2_path: &Path,
    candidate: Option<&Path>,
    cfg: &RunConfig,
    necessary_only: bool,
    include_degenerate: bool,
) -> Result<CmdOutput> {
    let f1 = io::read_topology_file(f1_path)?;
    let f2 = io::read_topology_file(f2_path)?;
    match candidate {
        Some(path) => {
            let f = io::read_topology_file(path)?;
            if necessary_only {
                let passes = necessary_condition(&f1, &f2, &f)?;
                let text = match cfg.format {
                    OutputFormat::Json => serde_json::to_string_pretty(
                        &serde_json::json!({ "passes_necessary": passes }),
                    )?,
                    _ => format!(
                        "necessary condition: {}",
                        if passes { "passes" } else { "fails" }
                    ),
                };
                return Ok(if passes {
                    CmdOutput::ok(text)
                } else {
                    CmdOutput::negative(text)
                });
            }
            if f.leaf_count() > 8 {
                return Err(Error::LeafCountOutOfRange {
                    got: f.leaf_count(),
                    min: 3,
                    max: 8,
                });
            }
            let report = decide_membership(&f1, &f2, &f)?;
            let member = report.member;
            let text = match cfg.format {
                OutputFormat::Json => serde_json::to_string_pretty(&report)?,
                _ => format!(
                    "{} is {}a member (necessary condition {})",
                    report.candidate,
                    if member { "" } else { "not " },
                    if report.passes_necessary {
                        "passes"
                    } else {
                        "fails"
                    }
                ),
            };
            Ok(if member {
                CmdOutput::ok(text)
            } else {
                CmdOutput::negative(text)
            })
        }
        None => {
            let reports = compatibility_set(&f1, &f2, !include_degenerate)?;
            let text = match cfg.format {
                OutputFormat::Json => {
                    serde_json::to_string_pretty(&CompatFile::new(f1.leaf_count(), reports))?
                }
                _ => {
                    let mut out = String::new();
                    let members: Vec<&Topology> = reports
                        .iter()
                        .filter(|r| r.member)
                        .map(|r| &r.candidate)
                        .collect();
                    writeln!(
                        out,
                        "{} candidates, {} members",
                        reports.len(),
                        members.len()
                    )
                    .unwrap();
                    for m in members {
                        writeln!(out, "{m}").unwrap();
                    }
                    out.trim_end().to_string()
                }
            };
            Ok(CmdOutput::ok(text))
        }
    }
}

/// `distance`: the tropical distance between two inputs.
pub fn cmd_distance(a: &Path, b: &Path, cfg: &RunConfig) -> Result<CmdOutput> {
    let a = io::read_tree_input(a)?;
    let b = io::read_tree_input(b)?;
    let d = a.vector.trop_distance(&b.vector)?;
    let text = match cfg.format {
        OutputFormat::Json => serde_json::to_string_pretty(&serde_json::json!({ "distance": d }))?,
        _ => format!("{d}"),
    };
    Ok(CmdOutput::ok(text))
}

/// `permute`: relabel an input's leaves by σ (comma-separated images).
pub fn cmd_permute(path: &Path, sigma: &str, cfg: &RunConfig) -> Result<CmdOutput> {
    let input = io::read_tree_input(path)?;
    let images = sigma
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| Error::UnrecognizedInput(format!("bad permutation entry {s:?}: {e}")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let sigma = LeafPermutation::new(images)?;
    let permuted = input.vector.apply_permutation(&sigma)?;
    let labels: Vec<String> = (1..=permuted.leaf_count())
        .map(|i| input.labels[sigma.image(i) - 1].clone())
        .collect();
    let text = match cfg.format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(&VectorFile::from_vector(&permuted, Some(&labels)))?
        }
        _ => format!("{permuted}"),
    };
    Ok(CmdOutput::ok(text))
}

/// `random`: a seeded coalescent tree, as Newick (text) or vector JSON.
pub fn cmd_random(leaves: usize, cfg: &RunConfig) -> Result<CmdOutput> {
    let tree = random_coalescent_tree(leaves, cfg.seed.unwrap_or(0))?;
    let text = match cfg.format {
        OutputFormat::Json => {
            let w = tree_to_vector(&tree);
            let mut value =
                serde_json::to_value(VectorFile::from_vector(&w, Some(tree.leaf_labels())))?;
            value["newick"] = serde_json::Value::String(write_newick(&tree));
            serde_json::to_string_pretty(&value)?
        }
        _ => write_newick(&tree),
    };
    Ok(CmdOutput::ok(text))
}

/// `enumerate`: all (full-dimensional) topologies on N leaves.
pub fn cmd_enumerate(leaves: usize, all: bool, cfg: &RunConfig) -> Result<CmdOutput> {
    let topologies = enumerate_topologies(leaves, !all)?;
    let text = match cfg.format {
        OutputFormat::Json => serde_json::to_string_pretty(&serde_json::json!({
            "leaf_count": leaves,
            "count": topologies.len(),
            "topologies": topologies,
        }))?,
        _ => {
            let mut out = String::new();
            writeln!(out, "{} topologies", topologies.len()).unwrap();
            for t in &topologies {
                writeln!(out, "{t}").unwrap();
            }
            out.trim_end().to_string()
        }
    };
    Ok(CmdOutput::ok(text))
}

/// `repro`: replays the worked numeric examples end to end and prints one
/// pass/fail line each.
pub fn cmd_repro() -> Result<CmdOutput> {
    let mut out = String::new();
    let mut all_pass = true;
    let mut check = |name: &str, result: Result<bool>| {
        let pass = matches!(result, Ok(true));
        all_pass &= pass;
        writeln!(out, "[{}] {}", if pass { "PASS" } else { "FAIL" }, name).unwrap();
    };

    let close = |got: &PairVector, want: &[f64]| {
        got.coords()
            .iter()
            .zip(want)
            .all(|(a, b)| (a - b).abs() <= 1e-9)
    };
    let w1 = PairVector::new(4, vec![0.4, 0.8, 2.0, 0.8, 2.0, 2.0])?;
    let w2 = PairVector::new(4, vec![2.0, 2.0, 2.0, 0.8, 0.8, 0.4])?;

    check("four-leaf segment: lambdas (-1.6,-1.2,0,1.2,1.6)", {
        tropical_segment(&w1, &w2).map(|seg| {
            seg.lambdas().len() == 5
                && seg
                    .lambdas()
                    .iter()
                    .zip([-1.6, -1.2, 0.0, 1.2, 1.6])
                    .all(|(a, b)| (a - b).abs() <= 1e-9)
        })
    });

    check("four-leaf segment: five bending points after rescaling", {
        tropical_segment(&w1, &w2).map(|seg| {
            let y = seg.normalized_bend_points(2.0);
            close(&y[0], &[2.0, 2.0, 2.0, 0.8, 0.8, 0.4])
                && close(&y[1], &[2.0, 2.0, 2.0, 0.8, 0.8, 0.8])
                && close(&y[2], &[2.0, 2.0, 2.0, 0.8, 2.0, 2.0])
                && close(&y[3], &[0.8, 0.8, 2.0, 0.8, 2.0, 2.0])
                && close(&y[4], &[0.4, 0.8, 2.0, 0.8, 2.0, 2.0])
        })
    });

    check("four-leaf segment: point at lambda 0", {
        tropical_segment(&w1, &w2)
            .and_then(|seg| seg.point_at(0.0))
            .map(|p| close(&p, &[2.0, 2.0, 2.0, 0.8, 2.0, 2.0]))
    });

    check("four-leaf segment: bypasses the origin", {
        tropical_segment(&w1, &w2).map(|seg| !contains_origin(&seg, 1e-9))
    });

    let five_leaf_newick = "((A:8,B:8):12,(C:10,(D:5,E:5):5):10);";
    let five_leaf_coords = [16.0, 40.0, 40.0, 40.0, 40.0, 40.0, 40.0, 20.0, 20.0, 10.0];
    check("five-leaf tree: cophenetic vector (16,40,...,10)", {
        parse_newick(five_leaf_newick).map(|t| close(&tree_to_vector(&t), &five_leaf_coords))
    });

    check("five-leaf tree: ultrametric and tree metric", {
        parse_newick(five_leaf_newick).map(|t| {
            let w = tree_to_vector(&t);
            is_ultrametric(&w, 1e-9).kind == MetricKind::Ultrametric
                && is_tree_metric(&w, 1e-9).kind == MetricKind::TreeMetric
        })
    });

    check("five-leaf tree: clade family {1,2},{3,4,5},{4,5}", {
        let want: Topology =
            serde_json::from_str(r#"{"leaf_count":5,"clades":[[1,2],[3,4,5],[4,5]]}"#)?;
        parse_newick(five_leaf_newick)
            .and_then(|t| topology_of(&tree_to_vector(&t), 1e-9))
            .map(|f| f == want)
    });

    check("five-leaf vector realizes edges 12, 10, 5 at height 20", {
        PairVector::new(5, five_leaf_coords.to_vec())
            .and_then(|w| vector_to_tree(&w, Some(20.0), 1e-9))
            .map(|t| {
                let mut lengths: Vec<f64> = t.internal_edges().values().copied().collect();
                lengths.sort_by(f64::total_cmp);
                lengths
                    .iter()
                    .zip([5.0, 10.0, 12.0])
                    .all(|(a, b)| (a - b).abs() <= 1e-9)
            })
    });

    let w2_perm = PairVector::new(4, vec![0.8, 0.8, 2.0, 0.4, 2.0, 2.0])?;
    check(
        "relabeling: sigma=(2,3,1,4) carries one labeling to the other",
        {
            LeafPermutation::new(vec![2, 3, 1, 4]).and_then(|sigma| {
                Ok(close(&w2_perm.apply_permutation(&sigma)?, w1.coords())
                    && close(&w1.apply_permutation(&sigma.inverse())?, w2_perm.coords()))
            })
        },
    );

    check("relabeling: segments are equivariant under (4,3,2,1)", {
        LeafPermutation::new(vec![4, 3, 2, 1]).and_then(|sigma| {
            let star = PairVector::new(4, vec![2.0; 6])?;
            Ok(close(&w1.apply_permutation(&sigma)?, w2.coords())
                && check_equivariance(&w1, &star, &sigma, 1e-9)?
                && check_equivariance(&w1, &w2, &sigma, 1e-9)?)
        })
    });

    check("counts: 3, 15, 105 full-dimensional topologies", {
        Ok(enumerate_topologies(3, true)?.len() == 3
            && enumerate_topologies(4, true)?.len() == 15
            && enumerate_topologies(5, true)?.len() == 105)
    });

    check("five-leaf compatibility set has exactly five members", {
        let f1: Topology =
            serde_json::from_str(r#"{"leaf_count":5,"clades":[[1,2,3],[1,2],[4,5]]}"#)?;
        let f2: Topology =
            serde_json::from_str(r#"{"leaf_count":5,"clades":[[1,3,4,5],[1,3,5],[1,5]]}"#)?;
        let f3: Topology =
            serde_json::from_str(r#"{"leaf_count":5,"clades":[[1,2,3],[2,3],[4,5]]}"#)?;
        let reports = compatibility_set(&f1, &f2, true)?;
        let members: Vec<&Topology> = reports
            .iter()
            .filter(|r| r.member)
            .map(|r| &r.candidate)
            .collect();
        Ok(members.len() == 5 && !members.contains(&&f3))
    });

    check("degenerate pair: necessary passes, membership fails", {
        let f1: Topology = serde_json::from_str(r#"{"leaf_count":5,"clades":[[3,4]]}"#)?;
        let f2: Topology =
            serde_json::from_str(r#"{"leaf_count":5,"clades":[[1,4],[2,3],[1,2,3,4]]}"#)?;
        let f: Topology =
            serde_json::from_str(r#"{"leaf_count":5,"clades":[[1,4],[1,3,4],[2,5]]}"#)?;
        Ok(necessary_condition(&f1, &f2, &f)? && !decide_membership(&f1, &f2, &f)?.member)
    });

    check("twelve-leaf pair: necessary passes, membership fails", {
        let f1: Topology = serde_json::from_str(
            r#"{"leaf_count":12,"clades":[[1,2,7,8,9,12],[1,7,9],[2,8,12],[1,7],[2,8],[3,4,5,6,10,11],[3,5,11],[4,6,10],[3,5],[4,6]]}"#,
        )?;
        let f2: Topology = serde_json::from_str(
            r#"{"leaf_count":12,"clades":[[1,2,3,4,9,10],[2,3,4,9,10],[2,3,4,10],[3,4,10],[3,10],[5,6,7,8,11,12],[5,7,12],[6,8,11],[5,7],[6,8]]}"#,
        )?;
        let f: Topology = serde_json::from_str(
            r#"{"leaf_count":12,"clades":[[1,2,3,4,9,10],[1,2,9],[3,4,10],[1,9],[3,10],[5,6,7,8,11,12],[5,6,11],[7,8,12],[5,11],[7,12]]}"#,
        )?;
        Ok(necessary_condition(&f1, &f2, &f)? && !decide_membership(&f1, &f2, &f)?.member)
    });

    check("tropical distance between the four-leaf pair is 3.2", {
        w1.trop_distance(&w2).map(|d| (d - 3.2).abs() <= 1e-9)
    });

    writeln!(
        out,
        "{}",
        if all_pass {
            "all checks passed"
        } else {
            "SOME CHECKS FAILED"
        }
    )
    .unwrap();
    let text = out.trim_end().to_string();
    Ok(if all_pass {
        CmdOutput::ok(text)
    } else {
        CmdOutput::negative(text)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repro_table_is_green() {
        let out = cmd_repro().unwrap();
        assert_eq!(out.exit_code, 0, "{}", out.text);
        assert!(out.text.contains("all checks passed"));
    }

    #[test]
    fn config_rejects_nonpositive_tolerance() {
        let cfg = RunConfig {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(cfg.validated().is_err());
    }
}
