use std::collections::HashMap;
use std::path::{Path, PathBuf};

use andor_vrp::exact::{solve_exact, ExactBudget, ExactStatus};
use andor_vrp::experiment::bench::Reference;
use andor_vrp::instance::read_instance;
use andor_vrp::Instance;
use serde::Deserialize;

use crate::Failure;

pub fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

pub fn read_instance_file(path: &Path) -> Result<Instance, Failure> {
    read_instance(&read_text(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Files as given; directories contribute their `.avrp` files in name order.
pub fn read_instances(paths: &[PathBuf]) -> Result<Vec<Instance>, Failure> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = std::fs::read_dir(p)
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "avrp"))
                .collect();
            found.sort();
            if found.is_empty() {
                return Err(Failure::Usage(format!("{}: no .avrp files", p.display())));
            }
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    files.iter().map(|f| read_instance_file(f)).collect()
}

#[derive(Deserialize)]
struct ReferenceRow {
    instance: String,
    optimum: Option<f64>,
    milp: Option<f64>,
}

/// Reference values per instance: the CSV first, then branch and bound for
/// small instances still lacking an optimum.
pub fn references(
    instances: &[Instance],
    csv_path: &Option<PathBuf>,
    exact_below: usize,
    exact_time_limit: f64,
) -> Result<Vec<Reference>, Failure> {
    let mut known: HashMap<String, Reference> = HashMap::new();
    if let Some(path) = csv_path {
        let text = read_text(path)?;
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        for row in reader.deserialize::<ReferenceRow>() {
            let row = row.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            known.insert(
                row.instance,
                Reference {
                    optimum: row.optimum,
                    milp: row.milp,
                },
            );
        }
    }
    let budget = ExactBudget {
        time_limit: (exact_time_limit > 0.0).then_some(exact_time_limit),
        node_limit: None,
    };
    Ok(instances
        .iter()
        .map(|inst| {
            let mut r = known.get(inst.name()).copied().unwrap_or_default();
            if r.optimum.is_none() && inst.n() <= exact_below {
                let res = solve_exact(inst, budget);
                if res.status == ExactStatus::Optimal {
                    r.optimum = res.objective;
                }
            }
            r
        })
        .collect())
}

/// Writes to `path`, or stdout when `None`.
pub fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Internal(format!("{}: {e}", p.display())))
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Internal(format!("stdout: {e}")))
        }
    }
}
