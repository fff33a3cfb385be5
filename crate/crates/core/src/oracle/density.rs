use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Conserved quantity used to block-diagonalise a two-mode density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectorSymmetry {
    /// A single block.
    None,
    /// Total parity `(-1)^(n1 + n2)`; every zero-mean Gaussian state has it.
    Parity,
    /// `n1 + n2`, for states with no pairing.
    Total,
    /// `n1 - n2`, for states with no coherence.
    Difference,
}

impl SectorSymmetry {
    /// Symmetry of the partial transpose on mode 2.
    pub fn partial_transpose(self) -> Self {
        match self {
            Self::Total => Self::Difference,
            Self::Difference => Self::Total,
            s => s,
        }
    }
}

/// Sector bases for a cutoff and a symmetry, plus the reverse lookup.
#[derive(Debug, Clone)]
pub struct SectorLayout {
    pub cutoff: usize,
    pub symmetry: SectorSymmetry,
    pub bases: Vec<Vec<(usize, usize)>>,
    /// `(sector, position)` of `(i, j)` at index `i * (cutoff + 1) + j`.
    pub index: Vec<(usize, usize)>,
}

impl SectorLayout {
    pub fn new(cutoff: usize, symmetry: SectorSymmetry) -> Self {
        let d = cutoff + 1;
        let key = |i: usize, j: usize| -> usize {
            match symmetry {
                SectorSymmetry::None => 0,
                SectorSymmetry::Parity => (i + j) % 2,
                SectorSymmetry::Total => i + j,
                SectorSymmetry::Difference => i + cutoff - j,
            }
        };
        let count = match symmetry {
            SectorSymmetry::None => 1,
            SectorSymmetry::Parity => 2.min(d * d),
            SectorSymmetry::Total | SectorSymmetry::Difference => 2 * cutoff + 1,
        };
        let mut bases = vec![Vec::new(); count];
        let mut index = vec![(0, 0); d * d];
        for i in 0..d {
            for j in 0..d {
                let s = key(i, j);
                index[i * d + j] = (s, bases[s].len());
                bases[s].push((i, j));
            }
        }
        Self {
            cutoff,
            symmetry,
            bases,
            index,
        }
    }

    pub fn locate(&self, i: usize, j: usize) -> (usize, usize) {
        self.index[i * (self.cutoff + 1) + j]
    }
}

/// Two-mode density matrix on `0..=cutoff` quanta per mode, stored as the
/// diagonal blocks of a conserved quantity.
#[derive(Debug, Clone)]
pub struct FockDensityMatrix {
    layout: SectorLayout,
    blocks: Vec<DMatrix<Complex64>>,
    tail_mass: f64,
}

impl FockDensityMatrix {
    pub fn from_blocks(layout: SectorLayout, blocks: Vec<DMatrix<Complex64>>) -> Self {
        assert_eq!(layout.bases.len(), blocks.len());
        for (b, m) in layout.bases.iter().zip(&blocks) {
            assert_eq!((b.len(), b.len()), m.shape());
        }
        let mut rho = Self {
            layout,
            blocks,
            tail_mass: 0.0,
        };
        rho.tail_mass = (1.0 - rho.trace()).max(0.0);
        rho
    }

    /// Dense matrix indexed by `i * (cutoff + 1) + j`.
    pub fn from_dense(cutoff: usize, dense: &DMatrix<Complex64>) -> Self {
        let d = cutoff + 1;
        assert_eq!(dense.shape(), (d * d, d * d));
        let layout = SectorLayout::new(cutoff, SectorSymmetry::None);
        Self::from_blocks(layout, vec![dense.clone()])
    }

    pub fn cutoff(&self) -> usize {
        self.layout.cutoff
    }

    pub fn symmetry(&self) -> SectorSymmetry {
        self.layout.symmetry
    }

    pub fn layout(&self) -> &SectorLayout {
        &self.layout
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    /// `1 - trace`, the population lost above the cutoff.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `<i, j| rho |k, l>`
    pub fn get(&self, x: (usize, usize), y: (usize, usize)) -> Complex64 {
        let n = self.layout.cutoff;
        if x.0 > n || x.1 > n || y.0 > n || y.1 > n {
            return Complex64::new(0.0, 0.0);
        }
        let (sx, px) = self.layout.locate(x.0, x.1);
        let (sy, py) = self.layout.locate(y.0, y.1);
        if sx != sy {
            return Complex64::new(0.0, 0.0);
        }
        self.blocks[sx][(px, py)]
    }

    pub fn trace(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.diagonal().iter().map(|z| z.re).sum::<f64>())
            .sum()
    }

    /// Dense `(N+1)^2` square matrix; only sensible for small cutoffs.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.layout.cutoff + 1;
        let mut m = DMatrix::zeros(d * d, d * d);
        for (basis, block) in self.layout.bases.iter().zip(&self.blocks) {
            for (a, &(i, j)) in basis.iter().enumerate() {
                for (b, &(k, l)) in basis.iter().enumerate() {
                    m[(i * d + j, k * d + l)] = block[(a, b)];
                }
            }
        }
        m
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (b - b.adjoint()).camax())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over all blocks, with rounding noise below zero
    /// cleared.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|b| b.nrows() > 0)
            .map(|b| {
                hermitian_eigenvalues(b)
                    .into_iter()
                    .map(super::moments::floor_eigenvalue)
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `P(n1, n2)` on the diagonal.
    pub fn population(&self, i: usize, j: usize) -> f64 {
        self.get((i, j), (i, j)).re
    }
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().collect()
}
