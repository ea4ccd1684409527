use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use nonlocal_flow::field::{fmt_sci, write_field_csv, RearrangedProfile};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::runner::RunOutput;

/// Pretty JSON with every float in round-trip scientific notation.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{value:.8e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report types serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_profile_dat(path: &Path, p: &RearrangedProfile<f64>) -> io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "# y level")?;
    let ys = p.breakpoints();
    for (k, &v) in p.levels().iter().enumerate() {
        writeln!(w, "{} {}", fmt_sci(ys[k]), fmt_sci(v))?;
        writeln!(w, "{} {}", fmt_sci(ys[k + 1]), fmt_sci(v))?;
    }
    w.flush()
}

/// Writes all artifacts of a run into `dir/<name>/` and returns that path.
pub fn write_outputs(dir: &Path, run: &RunOutput) -> io::Result<PathBuf> {
    let out = dir.join(&run.scenario.name);
    fs::create_dir_all(&out)?;
    let traj = &run.traj;

    let mut w = create(&out.join("trajectory.csv"))?;
    writeln!(w, "t,lambda,energy,mass,min,max")?;
    for i in 0..traj.len() {
        let s = &traj.snapshots[i];
        let row = [traj.times[i], traj.lambda[i], traj.energy[i], traj.mass[i], s.min(), s.max()];
        writeln!(w, "{}", row.map(fmt_sci).join(","))?;
    }
    w.flush()?;

    let mut w = create(&out.join("energy.dat"))?;
    writeln!(w, "# t energy")?;
    for (t, e) in traj.times.iter().zip(&traj.energy) {
        writeln!(w, "{} {}", fmt_sci(*t), fmt_sci(*e))?;
    }
    w.flush()?;

    let mut w = create(&out.join("mass_defect.dat"))?;
    writeln!(w, "# t mass_defect")?;
    for (t, m) in traj.times.iter().zip(&traj.mass) {
        writeln!(w, "{} {}", fmt_sci(*t), fmt_sci((m - traj.mass[0]).abs()))?;
    }
    w.flush()?;

    write_profile_dat(&out.join("profile_initial.dat"), &traj.initial().decreasing_rearrangement())?;
    write_profile_dat(&out.join("profile_final.dat"), &traj.last().decreasing_rearrangement())?;
    write_field_csv(create(&out.join("final_state.csv"))?, traj.last()).map_err(io::Error::other)?;

    if run.scenario.write_snapshots {
        let snaps = out.join("snapshots");
        fs::create_dir_all(&snaps)?;
        for (i, s) in traj.snapshots.iter().enumerate() {
            write_field_csv(create(&snaps.join(format!("u_{i:05}.csv")))?, s).map_err(io::Error::other)?;
        }
    }

    fs::write(out.join("report.json"), to_json(&run.report))?;
    Ok(out)
}
