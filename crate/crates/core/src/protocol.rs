//! Simulation protocols: shared-randomness codes and non-signaling maps.

use crate::error::{Error, Result};
use crate::prob::{Channel, Pmf};
use crate::scalar::Scalar;

/// A non-signaling map `N(i, y | x, j)` with `i, j ∈ [M]`.
///
/// For every `(x, j)` the table `(i, y) ↦ N(i, y | x, j)` is a pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct NsMap<T: Scalar> {
    m: usize,
    nx: usize,
    ny: usize,
    /// Flattened as `[[[[y] i] j] x]`.
    entries: Vec<T>,
}

impl<T: Scalar> NsMap<T> {
    /// Build from a function `(i, y, x, j) ↦ N(i, y | x, j)`.
    pub fn from_fn(m: usize, nx: usize, ny: usize, mut f: impl FnMut(usize, usize, usize, usize) -> T) -> Result<Self> {
        let mut entries = Vec::with_capacity(nx * m * m * ny);
        for x in 0..nx {
            for j in 0..m {
                for i in 0..m {
                    for y in 0..ny {
                        entries.push(f(i, y, x, j));
                    }
                }
            }
        }
        Self::from_entries(m, nx, ny, entries)
    }

    pub fn from_entries(m: usize, nx: usize, ny: usize, entries: Vec<T>) -> Result<Self> {
        if m == 0 || nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument("empty alphabet in NS map".into()));
        }
        if entries.len() != nx * m * m * ny {
            return Err(Error::DimensionMismatch(format!(
                "NS map needs {} entries, got {}",
                nx * m * m * ny,
                entries.len()
            )));
        }
        let map = Self { m, nx, ny, entries };
        for x in 0..nx {
            for j in 0..m {
                let mut sum = T::zero();
                for i in 0..m {
                    for y in 0..ny {
                        let v = map.get(i, y, x, j);
                        if *v < T::zero() {
                            return Err(Error::InvalidArgument(format!("negative entry N({i},{y}|{x},{j})")));
                        }
                        sum = sum + v.clone();
                    }
                }
                if (sum.clone() - T::one()).abs() > T::normalization_tolerance() {
                    return Err(Error::InvalidArgument(format!(
                        "N(.,.|{x},{j}) sums to {}",
                        sum.to_f64_lossy()
                    )));
                }
            }
        }
        Ok(map)
    }

    /// Product strategy `E(i|x)·D(y|j)`; `encoder[x][i]`, `decoder[j][y]`.
    pub fn product(encoder: &[Vec<T>], decoder: &[Vec<T>]) -> Result<Self> {
        let nx = encoder.len();
        let m = decoder.len();
        let ny = decoder.first().map_or(0, |d| d.len());
        if encoder.iter().any(|e| e.len() != m) {
            return Err(Error::DimensionMismatch("encoder rows must have M entries".into()));
        }
        Self::from_fn(m, nx, ny, |i, y, x, j| encoder[x][i].clone() * decoder[j][y].clone())
    }

    /// Embed a shared-randomness protocol: `Σ_s p(s) E(i|x,s) D(y|j,s)`.
    pub fn from_sr(proto: &SrProtocol<T>) -> Result<Self> {
        let ns = proto.shared_law.len();
        Self::from_fn(proto.m, proto.nx, proto.ny, |i, y, x, j| {
            let mut acc = T::zero();
            for s in 0..ns {
                acc = acc
                    + proto.shared_law.get(s).clone() * proto.encoder(s, x)[i].clone() * proto.decoder(s, j)[y].clone();
            }
            acc
        })
    }

    pub fn message_size(&self) -> usize {
        self.m
    }

    pub fn input_size(&self) -> usize {
        self.nx
    }

    pub fn output_size(&self) -> usize {
        self.ny
    }

    /// `N(i, y | x, j)`.
    pub fn get(&self, i: usize, y: usize, x: usize, j: usize) -> &T {
        &self.entries[((x * self.m + j) * self.m + i) * self.ny + y]
    }
}

/// A shared-randomness simulation code.
#[derive(Debug, Clone, PartialEq)]
pub struct SrProtocol<T: Scalar> {
    m: usize,
    nx: usize,
    ny: usize,
    /// `encoder[s][x]` is a pmf over messages.
    encoder: Vec<Vec<Vec<T>>>,
    /// `decoder[s][j]` is a pmf over outputs.
    decoder: Vec<Vec<Vec<T>>>,
    shared_law: Pmf<T>,
}

impl<T: Scalar> SrProtocol<T> {
    /// `encoder[s][x][i] = E(i|x,s)`, `decoder[s][j][y] = D(y|j,s)`.
    pub fn new(encoder: Vec<Vec<Vec<T>>>, decoder: Vec<Vec<Vec<T>>>, shared_law: Pmf<T>) -> Result<Self> {
        let ns = shared_law.len();
        if encoder.len() != ns || decoder.len() != ns {
            return Err(Error::DimensionMismatch(format!(
                "shared alphabet has {ns} symbols but encoder/decoder tables have {}/{}",
                encoder.len(),
                decoder.len()
            )));
        }
        let nx = encoder[0].len();
        let m = decoder[0].len();
        let ny = decoder[0].first().map_or(0, |d| d.len());
        if nx == 0 || m == 0 || ny == 0 {
            return Err(Error::InvalidArgument("empty alphabet in protocol".into()));
        }
        for s in 0..ns {
            if encoder[s].len() != nx || decoder[s].len() != m {
                return Err(Error::DimensionMismatch(format!("shape mismatch at s = {s}")));
            }
            for (x, row) in encoder[s].iter().enumerate() {
                if row.len() != m {
                    return Err(Error::DimensionMismatch(format!(
                        "encoder row (x={x}, s={s}) has {} entries, expected {m}",
                        row.len()
                    )));
                }
                Pmf::new(row.clone())
                    .map_err(|e| Error::InvalidArgument(format!("encoder row (x={x}, s={s}): {e}")))?;
            }
            for (j, row) in decoder[s].iter().enumerate() {
                if row.len() != ny {
                    return Err(Error::DimensionMismatch(format!(
                        "decoder row (j={j}, s={s}) has {} entries, expected {ny}",
                        row.len()
                    )));
                }
                Pmf::new(row.clone())
                    .map_err(|e| Error::InvalidArgument(format!("decoder row (j={j}, s={s}): {e}")))?;
            }
        }
        Ok(Self {
            m,
            nx,
            ny,
            encoder,
            decoder,
            shared_law,
        })
    }

    pub fn message_size(&self) -> usize {
        self.m
    }

    pub fn shared_law(&self) -> &Pmf<T> {
        &self.shared_law
    }

    pub fn encoder(&self, s: usize, x: usize) -> &[T] {
        &self.encoder[s][x]
    }

    pub fn decoder(&self, s: usize, j: usize) -> &[T] {
        &self.decoder[s][j]
    }
}

/// Channel realised by a shared-randomness code over a noiseless `M`-ary link.
pub fn induced_channel_sr<T: Scalar>(proto: &SrProtocol<T>) -> Result<Channel<T>> {
    let mut rows = vec![vec![T::zero(); proto.ny]; proto.nx];
    for s in 0..proto.shared_law.len() {
        let ps = proto.shared_law.get(s).clone();
        for (x, row) in rows.iter_mut().enumerate() {
            for i in 0..proto.m {
                let wi = ps.clone() * proto.encoder(s, x)[i].clone();
                if wi.is_zero() {
                    continue;
                }
                for (y, out) in row.iter_mut().enumerate() {
                    *out = out.clone() + wi.clone() * proto.decoder(s, i)[y].clone();
                }
            }
        }
    }
    Channel::with_row_tolerance(
        (0..proto.nx).map(|i| i.to_string()).collect(),
        (0..proto.ny).map(|i| i.to_string()).collect(),
        rows,
        T::normalization_tolerance() * T::from_usize(proto.m * proto.shared_law.len() + 1).unwrap(),
    )
}

/// Channel realised by plugging the identity channel into an NS map.
pub fn induced_channel_ns<T: Scalar>(map: &NsMap<T>) -> Result<Channel<T>> {
    let rows = (0..map.nx)
        .map(|x| {
            (0..map.ny)
                .map(|y| (0..map.m).fold(T::zero(), |a, i| a + map.get(i, y, x, i).clone()))
                .collect()
        })
        .collect();
    Channel::with_row_tolerance(
        (0..map.nx).map(|i| i.to_string()).collect(),
        (0..map.ny).map(|i| i.to_string()).collect(),
        rows,
        T::normalization_tolerance() * T::from_usize(map.m + 1).unwrap(),
    )
}

/// Whether the sender's marginal ignores `j` and the receiver's marginal ignores `x`.
pub fn check_non_signaling<T: Scalar>(map: &NsMap<T>, tol: T) -> bool {
    // Σ_y N(i,y|x,j) independent of j.
    for x in 0..map.nx {
        for i in 0..map.m {
            let marg = |j: usize| (0..map.ny).fold(T::zero(), |a, y| a + map.get(i, y, x, j).clone());
            let base = marg(0);
            for j in 1..map.m {
                if (marg(j) - base.clone()).abs() > tol {
                    return false;
                }
            }
        }
    }
    // Σ_i N(i,y|x,j) independent of x.
    for j in 0..map.m {
        for y in 0..map.ny {
            let marg = |x: usize| (0..map.m).fold(T::zero(), |a, i| a + map.get(i, y, x, j).clone());
            let base = marg(0);
            for x in 1..map.nx {
                if (marg(x) - base.clone()).abs() > tol {
                    return false;
                }
            }
        }
    }
    true
}
