use crate::grassmann::{Blade, Grading, GrassmannElement, Parity};
use crate::scalar::Real;
use crate::scurves::CurveError;

/// A sampled quantity: a coordinate jet (`x`, `dx`, `ddx`) or a momentum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub name: String,
    pub parity: Parity,
}

impl Channel {
    pub fn new(name: impl Into<String>, parity: Parity) -> Self {
        Channel { name: name.into(), parity }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryMeta {
    pub dt: Option<f64>,
    pub model_hash: Option<String>,
}

/// Time samples of an S-curve: one Grassmann value per channel per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T = f64> {
    q: u32,
    channels: Vec<Channel>,
    times: Vec<T>,
    values: Vec<Vec<GrassmannElement<T>>>,
    pub meta: TrajectoryMeta,
}

impl<T: Real> Trajectory<T> {
    pub fn new(q: u32, channels: Vec<Channel>) -> Self {
        Trajectory { q, channels, times: Vec::new(), values: Vec::new(), meta: TrajectoryMeta::default() }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channels.iter().position(|c| c.name == name)
    }

    pub fn sample(&self, i: usize) -> &[GrassmannElement<T>] {
        &self.values[i]
    }

    pub fn value(&self, i: usize, channel: usize) -> &GrassmannElement<T> {
        &self.values[i][channel]
    }

    /// Appends a sample; times must increase strictly and values must
    /// match the channel parities and `q`.
    pub fn push(&mut self, t: T, values: Vec<GrassmannElement<T>>) -> Result<(), CurveError> {
        if values.len() != self.channels.len() {
            return Err(CurveError::Schema(format!("sample has {} values for {} channels", values.len(), self.channels.len())));
        }
        if let Some(last) = self.times.last() {
            if t.is_nan() || t <= *last {
                return Err(CurveError::Schema("sample times must increase strictly".into()));
            }
        }
        for (v, c) in values.iter().zip(&self.channels) {
            if v.q() != self.q {
                return Err(CurveError::Schema(format!("value of '{}' has q = {}, expected {}", c.name, v.q(), self.q)));
            }
            if v.grading() != Grading::Homogeneous(c.parity) && !v.is_zero() {
                return Err(CurveError::Parity(c.name.clone()));
            }
        }
        self.times.push(t);
        self.values.push(values);
        Ok(())
    }

    /// Adds a channel whose value at sample `i` is `f(i)`.
    pub fn add_channel(
        &mut self,
        channel: Channel,
        mut f: impl FnMut(usize) -> Result<GrassmannElement<T>, CurveError>,
    ) -> Result<(), CurveError> {
        if self.channel_index(&channel.name).is_some() {
            return Err(CurveError::Schema(format!("duplicate channel '{}'", channel.name)));
        }
        let mut column = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let v = f(i)?;
            if !v.is_zero() && v.grading() != Grading::Homogeneous(channel.parity) {
                return Err(CurveError::Parity(channel.name.clone()));
            }
            column.push(v);
        }
        for (row, v) in self.values.iter_mut().zip(column) {
            row.push(v);
        }
        self.channels.push(channel);
        Ok(())
    }

    /// Keeps only the named channels, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Trajectory<T>, CurveError> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.channel_index(n).ok_or_else(|| CurveError::MissingChannel(n.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(Trajectory {
            q: self.q,
            channels: idx.iter().map(|&i| self.channels[i].clone()).collect(),
            times: self.times.clone(),
            values: self.values.iter().map(|row| idx.iter().map(|&i| row[i].clone()).collect()).collect(),
            meta: self.meta.clone(),
        })
    }

    /// Applies `f` to every value, producing a trajectory over Λ_{q_new}.
    pub fn map_values(
        &self,
        q_new: u32,
        mut f: impl FnMut(&GrassmannElement<T>) -> Result<GrassmannElement<T>, CurveError>,
    ) -> Result<Trajectory<T>, CurveError> {
        let mut out = Trajectory::new(q_new, self.channels.clone());
        out.meta = self.meta.clone();
        for (t, row) in self.times.iter().zip(&self.values) {
            let mapped = row.iter().map(&mut f).collect::<Result<Vec<_>, _>>()?;
            out.push(*t, mapped)?;
        }
        Ok(out)
    }

    /// Largest componentwise difference to another trajectory with the same
    /// channels and sample times.
    pub fn max_deviation(&self, other: &Trajectory<T>) -> Result<T, CurveError> {
        if self.channels != other.channels || self.len() != other.len() || self.q != other.q {
            return Err(CurveError::Schema("trajectories have different schemas".into()));
        }
        let mut worst = T::zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max(x.try_sub(y)?.max_abs());
            }
        }
        Ok(worst)
    }

    /// Basis monomials stored for a channel.
    pub fn blades(&self, channel: usize) -> Vec<Blade> {
        Blade::all_with_parity(self.q, self.channels[channel].parity)
    }
}
