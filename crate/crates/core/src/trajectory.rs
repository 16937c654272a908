//! Time-stamped state sequences produced by the integrators.

use std::io::{self, Read, Write};

use crate::error::{Error, Result};

const BIN_MAGIC: &[u8; 4] = b"IVRI";

/// Provenance of a trajectory: which model, integrator and step produced it,
/// plus discretization counters from the stochastic scheme.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryMeta {
    pub model: String,
    pub integrator: String,
    pub dt: f64,
    /// Gating components clamped back into [0,1] after an Euler step.
    pub clamp_events: u64,
    /// Recorded input values at or below the CIR barrier.
    pub barrier_violations: u64,
}

/// Increasing times with matching m-dimensional states, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    data: Vec<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(dim: usize, meta: TrajectoryMeta) -> Trajectory {
        assert!(dim >= 1);
        Trajectory { dim, times: Vec::new(), data: Vec::new(), meta }
    }

    /// Appends a sample; times must increase strictly and states stay finite.
    pub fn push(&mut self, t: f64, state: &[f64]) -> Result<()> {
        if state.len() != self.dim {
            return Err(Error::domain(format!(
                "state dimension {} does not match trajectory dimension {}",
                state.len(),
                self.dim
            )));
        }
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::domain(format!(
                    "times must increase strictly: {t} after {last}"
                )));
            }
        }
        if !t.is_finite() || state.iter().any(|x| !x.is_finite()) {
            return Err(Error::numeric(format!("non-finite sample at t = {t}")));
        }
        self.times.push(t);
        self.data.extend_from_slice(state);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("empty trajectory")
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.times.iter().copied().zip(self.data.chunks(self.dim))
    }

    /// State at time `t` by linear interpolation between stored samples.
    pub fn interpolate(&self, t: f64) -> Vec<f64> {
        assert!(!self.is_empty());
        let n = self.len();
        if t <= self.times[0] {
            return self.state(0).to_vec();
        }
        if t >= self.times[n - 1] {
            return self.last_state().to_vec();
        }
        let i = match self.times.partition_point(|&u| u <= t) {
            0 => 1,
            k => k,
        };
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        self.state(i - 1)
            .iter()
            .zip(self.state(i))
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    /// CSV with the given column names for the state components; the time
    /// column is always first.
    pub fn write_csv<W: Write>(&self, mut w: W, state_columns: &[&str]) -> io::Result<()> {
        assert_eq!(state_columns.len(), self.dim);
        write!(w, "t")?;
        for c in state_columns {
            write!(w, ",{c}")?;
        }
        writeln!(w)?;
        for (t, x) in self.iter() {
            write!(w, "{t:.17e}")?;
            for v in x {
                write!(w, ",{v:.17e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Binary cache: magic `IVRI`, little-endian `u32` state dimension,
    /// `u64` sample count, then `count` rows of `1 + dim` `f64` values
    /// (time first), row-major.
    pub fn write_bin<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(BIN_MAGIC)?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for (t, x) in self.iter() {
            w.write_all(&t.to_le_bytes())?;
            for v in x {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_bin<R: Read>(mut r: R) -> Result<Trajectory> {
        let bad = |msg: &str| Error::domain(format!("trajectory cache: {msg}"));
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
        if &magic != BIN_MAGIC {
            return Err(bad("bad magic bytes"));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4).map_err(|_| bad("truncated dimension"))?;
        let dim = u32::from_le_bytes(b4) as usize;
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8).map_err(|_| bad("truncated count"))?;
        let count = u64::from_le_bytes(b8) as usize;
        let mut traj = Trajectory::new(dim, TrajectoryMeta::default());
        let mut row = vec![0.0f64; dim];
        for _ in 0..count {
            r.read_exact(&mut b8).map_err(|_| bad("truncated row"))?;
            let t = f64::from_le_bytes(b8);
            for v in row.iter_mut() {
                r.read_exact(&mut b8).map_err(|_| bad("truncated row"))?;
                *v = f64::from_le_bytes(b8);
            }
            traj.push(t, &row)?;
        }
        Ok(traj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trajectory {
        let mut t = Trajectory::new(2, TrajectoryMeta {
            model: "test".into(),
            integrator: "rk4".into(),
            dt: 0.5,
            ..Default::default()
        });
        t.push(0.0, &[1.0, 2.0]).unwrap();
        t.push(0.5, &[3.0, 4.0]).unwrap();
        t.push(1.0, &[5.0, 6.0]).unwrap();
        t
    }

    #[test]
    fn rejects_non_increasing_times() {
        let mut t = sample();
        assert!(t.push(1.0, &[0.0, 0.0]).is_err());
        assert!(t.push(0.2, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn rejects_nan() {
        let mut t = sample();
        assert!(t.push(2.0, &[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn interpolation_is_linear() {
        let t = sample();
        assert_eq!(t.interpolate(0.25), vec![2.0, 3.0]);
        assert_eq!(t.interpolate(-1.0), vec![1.0, 2.0]);
        assert_eq!(t.interpolate(9.0), vec![5.0, 6.0]);
    }

    #[test]
    fn binary_roundtrip() {
        let t = sample();
        let mut buf = Vec::new();
        t.write_bin(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"IVRI");
        let back = Trajectory::read_bin(buf.as_slice()).unwrap();
        assert_eq!(back.times(), t.times());
        assert_eq!(back.state(1), t.state(1));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let t = sample();
        let mut buf = Vec::new();
        t.write_csv(&mut buf, &["a", "b"]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,a,b");
        assert_eq!(lines.count(), 3);
    }
}
