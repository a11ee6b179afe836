//! Classic fixed-step fourth-order Runge–Kutta over the component system.

use crate::scalar::{lit, Real};
use crate::scurves::{ComponentSystem, CurveError, InitialState, Trajectory};

fn axpy<T: Real>(y: &[T], h: T, k: &[T], out: &mut [T]) {
    for ((o, yi), ki) in out.iter_mut().zip(y).zip(k) {
        *o = *yi + h * *ki;
    }
}

/// Integrates from `t0` to `t1` in `round((t1 − t0) / dt)` equal steps and
/// records every step. The last recorded time is exactly `t1`.
pub fn integrate<T: Real>(
    sys: &ComponentSystem,
    init: &InitialState<T>,
    t0: T,
    t1: T,
    dt: T,
) -> Result<Trajectory<T>, CurveError> {
    if !dt.is_finite() || dt <= T::zero() {
        return Err(CurveError::Schema("dt must be positive".into()));
    }
    if t0.is_nan() || t1.is_nan() || t1 <= t0 {
        return Err(CurveError::Schema("t1 must exceed t0".into()));
    }
    let steps = ((t1 - t0) / dt)
        .round()
        .to_usize()
        .filter(|n| *n > 0)
        .ok_or_else(|| CurveError::Schema("step count out of range".into()))?;
    let h = (t1 - t0) / T::from_usize(steps).expect("step count fits the scalar type");
    let half = lit::<T>(0.5);
    let sixth = lit::<T>(1.0 / 6.0);
    let two = lit::<T>(2.0);

    let n = sys.dim();
    let mut y = sys.pack(init)?;
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);
    let mut traj = Trajectory::new(sys.q(), sys.channels());
    traj.meta.dt = h.to_f64();

    for i in 0..=steps {
        let t = t0 + T::from_usize(i).expect("step index fits the scalar type") * h;
        let tops = sys.derivative(&y, &mut k1)?;
        let sample = sys.sample(&y, &tops)?;
        if sample.iter().any(|v| !v.is_finite()) {
            let last = traj.times().last().copied().unwrap_or(t0);
            return Err(CurveError::NonFinite { last_good: last.to_f64().unwrap_or(f64::NAN) });
        }
        traj.push(t, sample)?;
        if i == steps {
            break;
        }
        axpy(&y, h * half, &k1, &mut tmp);
        sys.derivative(&tmp, &mut k2)?;
        axpy(&y, h * half, &k2, &mut tmp);
        sys.derivative(&tmp, &mut k3)?;
        axpy(&y, h, &k3, &mut tmp);
        sys.derivative(&tmp, &mut k4)?;
        for j in 0..n {
            y[j] = y[j] + h * sixth * (k1[j] + two * k2[j] + two * k3[j] + k4[j]);
        }
    }
    Ok(traj)
}
