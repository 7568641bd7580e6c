//! Artifact files: one CSV per trajectory and a JSON run summary.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use bohmpair_core::Trajectory;

use crate::scenario::Summary;

/// Header row of every trajectory file.
pub const CSV_HEADER: &str = "t,x1,y1,x2,y2,vy1,vy2";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TRAJECTORY_DIR: &str = "trajectories";

/// Write `traj` as CSV, SI units, 17 significant digits so values round-trip exactly.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &Trajectory) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for s in &traj.samples {
        let c = &s.config;
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            c.t, c.x1, c.y1, c.x2, c.y2, s.velocity.vy1, s.velocity.vy2
        )?;
    }
    w.flush()
}

pub fn trajectory_file_name(index: usize) -> String {
    format!("pair_{index:05}.csv")
}

/// Write every trajectory under `dir/trajectories/`, returning the paths
/// relative to `dir`.
pub fn write_trajectories(dir: &Path, trajectories: &[Trajectory]) -> io::Result<Vec<PathBuf>> {
    let sub = dir.join(TRAJECTORY_DIR);
    fs::create_dir_all(&sub)?;
    let mut written = Vec::with_capacity(trajectories.len());
    for (i, traj) in trajectories.iter().enumerate() {
        let rel = Path::new(TRAJECTORY_DIR).join(trajectory_file_name(i));
        write_trajectory_csv(BufWriter::new(File::create(dir.join(&rel))?), traj)?;
        written.push(rel);
    }
    Ok(written)
}

pub fn write_summary(dir: &Path, summary: &Summary) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(SUMMARY_FILE);
    let mut w = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut w, summary)?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}
