//! Tile geometry of the nested-frame product bases and the product states
//! built on it.
//!
//! For odd `d` with center `c = (d-1)/2`, layer `k ∈ 1..=c` is a square frame
//! of four tiles, each a strip of `2k` cells with one party's level fixed:
//!
//! | tile   | fixed level     | support on the other party |
//! |--------|-----------------|----------------------------|
//! | Top    | A = `c - k`     | B ∈ `[c-k, c+k-1]`         |
//! | Bottom | A = `c + k`     | B ∈ `[c-k+1, c+k]`         |
//! | Right  | B = `c + k`     | A ∈ `[c-k, c+k-1]`         |
//! | Left   | B = `c - k`     | A ∈ `[c-k+1, c+k]`         |
//!
//! Together with the central cell `(c, c)` the tiles cover the `d × d` grid
//! exactly once. Every tile contributes `2k - 1` members of the UPB: vectors
//! on its support orthogonal to the all-ones vector. The all-ones vector
//! itself (the "missing" state) is blocked by the stopper
//! `|0+…+(d-1)⟩|0+…+(d-1)⟩`.

use serde::{Deserialize, Serialize};

use crate::linalg::{root_of_unity, tensor, ComplexMatrix, Ket, C64};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TileId {
    Top,
    Bottom,
    Right,
    Left,
}

impl TileId {
    pub const ALL: [TileId; 4] = [TileId::Top, TileId::Bottom, TileId::Right, TileId::Left];
}

/// Choice of orthogonal basis for the all-ones complement on each tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Discrete Fourier vectors `ω^{j k'}`, `ω = e^{iπ/k}`.
    Dft,
    /// Real vectors: sign patterns for supports of length 4, Helmert
    /// vectors otherwise.
    Real,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dft" => Ok(Variant::Dft),
            "real" => Ok(Variant::Real),
            other => Err(Error::Argument(format!("unknown variant {other:?} (expected dft or real)"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Dft => "dft",
            Variant::Real => "real",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tile {
    pub id: TileId,
    pub layer: usize,
    /// Level of the fixed party.
    pub level: usize,
    /// Inclusive index range on the other party.
    pub support: (usize, usize),
    pub fixed_side: Party,
}

impl Tile {
    pub fn support_len(&self) -> usize {
        self.support.1 - self.support.0 + 1
    }

    /// Grid cells `(A level, B level)` covered by the tile.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        (self.support.0..=self.support.1)
            .map(|j| match self.fixed_side {
                Party::A => (self.level, j),
                Party::B => (j, self.level),
            })
            .collect()
    }

    /// Product state with `varying` placed on the tile's support.
    fn state(&self, d: usize, varying: &[C64]) -> (Ket, Ket) {
        let fixed = Ket::basis(d, self.level);
        let mut other = Ket::zeros(d);
        for (off, &z) in varying.iter().enumerate() {
            other[self.support.0 + off] = z;
        }
        match self.fixed_side {
            Party::A => (fixed, other),
            Party::B => (other, fixed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    pub k: usize,
    /// In the order Top, Bottom, Right, Left.
    pub tiles: [Tile; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileLayout {
    pub d: usize,
    pub center: usize,
    /// Ascending `k`, innermost first.
    pub layers: Vec<Layer>,
}

impl TileLayout {
    pub fn layer(&self, k: usize) -> Result<&Layer> {
        if k == 0 || k > self.layers.len() {
            return Err(Error::Argument(format!("layer {k} out of range 1..={}", self.layers.len())));
        }
        Ok(&self.layers[k - 1])
    }

    /// Index of the first UPB member of layer `k` in the outermost-first
    /// ordering.
    fn member_offset(&self, k: usize) -> usize {
        (k + 1..=self.layers.len()).map(|l| 4 * (2 * l - 1)).sum()
    }

    /// Layer index of every cell (`0` for the center).
    pub fn cell_layers(&self) -> Vec<Vec<usize>> {
        let mut grid = vec![vec![0; self.d]; self.d];
        for layer in &self.layers {
            for t in &layer.tiles {
                for (r, c) in t.cells() {
                    grid[r][c] = layer.k;
                }
            }
        }
        grid
    }
}

pub fn check_dimension(d: usize) -> Result<()> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::Argument("d must be odd and ≥ 3".into()));
    }
    Ok(())
}

pub fn layout(d: usize) -> Result<TileLayout> {
    check_dimension(d)?;
    let c = (d - 1) / 2;
    let layers = (1..=c)
        .map(|k| Layer {
            k,
            tiles: [
                Tile { id: TileId::Top, layer: k, level: c - k, support: (c - k, c + k - 1), fixed_side: Party::A },
                Tile { id: TileId::Bottom, layer: k, level: c + k, support: (c - k + 1, c + k), fixed_side: Party::A },
                Tile { id: TileId::Right, layer: k, level: c + k, support: (c - k, c + k - 1), fixed_side: Party::B },
                Tile { id: TileId::Left, layer: k, level: c - k, support: (c - k + 1, c + k), fixed_side: Party::B },
            ],
        })
        .collect();
    Ok(TileLayout { d, center: c, layers })
}

/// Where a product state comes from in the tile picture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Tile { layer: usize, tile: TileId, index: usize },
    Missing { layer: usize, tile: TileId },
    Central,
    Stopper,
    /// Added by a completion search.
    Found { index: usize },
}

/// A product vector `|a⟩|b⟩`, stored unnormalized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductState {
    pub label: String,
    pub provenance: Provenance,
    pub a: Ket,
    pub b: Ket,
}

impl ProductState {
    pub fn new(label: impl Into<String>, provenance: Provenance, a: Ket, b: Ket) -> Self {
        ProductState { label: label.into(), provenance, a, b }
    }

    /// `⟨self|other⟩ = ⟨a|a'⟩⟨b|b'⟩`.
    pub fn inner(&self, other: &ProductState) -> C64 {
        self.a.inner(&other.a) * self.b.inner(&other.b)
    }

    pub fn norm(&self) -> f64 {
        self.a.norm() * self.b.norm()
    }

    /// Overlap of the normalized states.
    pub fn normalized_inner(&self, other: &ProductState) -> C64 {
        self.inner(other) / (self.norm() * other.norm())
    }

    /// The full (unnormalized) vector `a ⊗ b`.
    pub fn ket(&self) -> Ket {
        tensor(&self.a, &self.b)
    }

    pub fn normalized_ket(&self) -> Ket {
        tensor(&self.a.normalized(), &self.b.normalized())
    }

    /// `|a⟩|b*⟩`, the image under transposition on B.
    pub fn conj_b(&self) -> ProductState {
        ProductState { b: self.b.conj(), ..self.clone() }
    }

    pub fn projector(&self) -> ComplexMatrix {
        let k = self.normalized_ket();
        ComplexMatrix::outer(&k, &k)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a.dim(), self.b.dim())
    }
}

/// An unextendible product basis: tile members plus the stopper.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Upb {
    pub d: usize,
    pub variant: Variant,
    pub members: Vec<ProductState>,
    pub stopper: ProductState,
}

impl Upb {
    /// Members followed by the stopper.
    pub fn all_states(&self) -> Vec<ProductState> {
        let mut v = self.members.clone();
        v.push(self.stopper.clone());
        v
    }

    pub fn len(&self) -> usize {
        self.members.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Looks up `psi{i}` or `S`.
    pub fn state(&self, label: &str) -> Option<&ProductState> {
        if self.stopper.label == label {
            return Some(&self.stopper);
        }
        self.members.iter().find(|s| s.label == label)
    }
}

/// Orthogonal basis (rows, unnormalized) of the complement of the all-ones
/// vector in `C^n`.
pub(crate) fn within_tile_basis(variant: Variant, n: usize) -> Vec<Vec<C64>> {
    match variant {
        Variant::Dft => (1..n)
            .map(|kp| (0..n).map(|j| root_of_unity(j * kp, n)).collect())
            .collect(),
        Variant::Real if n == 4 => [[1.0, -1.0, 1.0, -1.0], [1.0, 1.0, -1.0, -1.0], [1.0, -1.0, -1.0, 1.0]]
            .iter()
            .map(|row| row.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect(),
        Variant::Real => (1..n)
            .map(|r| {
                (0..n)
                    .map(|j| match j.cmp(&r) {
                        std::cmp::Ordering::Less => C64::new(1.0, 0.0),
                        std::cmp::Ordering::Equal => C64::new(-(r as f64), 0.0),
                        std::cmp::Ordering::Greater => C64::new(0.0, 0.0),
                    })
                    .collect()
            })
            .collect(),
    }
}

fn tile_states_with(
    layout: &TileLayout,
    k: usize,
    basis: &dyn Fn(usize) -> Vec<Vec<C64>>,
) -> Result<Vec<ProductState>> {
    let layer = layout.layer(k)?;
    let mut idx = layout.member_offset(k);
    let mut out = Vec::with_capacity(4 * (2 * k - 1));
    for tile in &layer.tiles {
        for (kp, row) in basis(tile.support_len()).into_iter().enumerate() {
            idx += 1;
            let (a, b) = tile.state(layout.d, &row);
            out.push(ProductState::new(
                format!("psi{idx}"),
                Provenance::Tile { layer: k, tile: tile.id, index: kp + 1 },
                a,
                b,
            ));
        }
    }
    Ok(out)
}

/// The `4(2k-1)` UPB members contributed by layer `k`.
pub fn tile_states(layout: &TileLayout, k: usize, variant: Variant) -> Result<Vec<ProductState>> {
    tile_states_with(layout, k, &|n| within_tile_basis(variant, n))
}

/// Uniform state of every tile (outermost layer first) followed by the
/// central state `|c⟩|c⟩`; `2d - 1` states labelled after the members.
pub fn missing_states(layout: &TileLayout) -> Vec<ProductState> {
    let d = layout.d;
    let t = (d - 1) * (d - 1);
    let mut out = Vec::with_capacity(2 * d - 1);
    for layer in layout.layers.iter().rev() {
        for tile in &layer.tiles {
            let ones = vec![C64::new(1.0, 0.0); tile.support_len()];
            let (a, b) = tile.state(d, &ones);
            out.push(ProductState::new(
                format!("psi{}", t + out.len() + 1),
                Provenance::Missing { layer: layer.k, tile: tile.id },
                a,
                b,
            ));
        }
    }
    let c = layout.center;
    out.push(ProductState::new(format!("psi{}", d * d), Provenance::Central, Ket::basis(d, c), Ket::basis(d, c)));
    out
}

pub fn stopper(d: usize) -> Result<ProductState> {
    check_dimension(d)?;
    Ok(ProductState::new("S", Provenance::Stopper, Ket::uniform(d, 0, d - 1), Ket::uniform(d, 0, d - 1)))
}

fn upb_with(d: usize, variant: Variant, basis: &dyn Fn(usize) -> Vec<Vec<C64>>) -> Result<Upb> {
    let lay = layout(d)?;
    let mut members = Vec::with_capacity((d - 1) * (d - 1));
    for k in (1..=lay.center).rev() {
        members.extend(tile_states_with(&lay, k, basis)?);
    }
    Ok(Upb { d, variant, members, stopper: stopper(d)? })
}

/// The `(d-1)^2 + 1`-element tiles UPB.
pub fn upb(d: usize, variant: Variant) -> Result<Upb> {
    upb_with(d, variant, &|n| within_tile_basis(variant, n))
}

/// UPB members (without the stopper) plus the missing states: a complete
/// orthogonal product basis of `C^d ⊗ C^d`.
pub fn copb(d: usize, variant: Variant) -> Result<Vec<ProductState>> {
    let u = upb(d, variant)?;
    let mut out = u.members;
    out.extend(missing_states(&layout(d)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{numeric_rank, RANK_TOL};

    fn amps(k: &Ket) -> Vec<f64> {
        k.amplitudes().iter().map(|z| z.re).collect()
    }

    fn max_offdiag(states: &[ProductState]) -> f64 {
        let mut worst = 0.0f64;
        for (i, s) in states.iter().enumerate() {
            for t in &states[i + 1..] {
                worst = worst.max(s.normalized_inner(t).norm());
            }
        }
        worst
    }

    #[test]
    fn rejects_bad_dimensions() {
        for d in [0, 1, 2, 4, 6] {
            assert!(layout(d).is_err());
            assert!(upb(d, Variant::Dft).is_err());
        }
    }

    #[test]
    fn d3_layout_matches_four_tiles() {
        let l = layout(3).unwrap();
        assert_eq!(l.center, 1);
        assert_eq!(l.layers.len(), 1);
        let t = &l.layers[0].tiles;
        assert_eq!(t[0].cells(), vec![(0, 0), (0, 1)]);
        assert_eq!(t[1].cells(), vec![(2, 1), (2, 2)]);
        assert_eq!(t[2].cells(), vec![(0, 2), (1, 2)]);
        assert_eq!(t[3].cells(), vec![(1, 0), (2, 0)]);
    }

    #[test]
    fn d5_layout_frame() {
        let l = layout(5).unwrap();
        let outer = &l.layers[1];
        assert_eq!(outer.k, 2);
        for t in &outer.tiles {
            assert_eq!(t.support_len(), 4);
            assert!(t.level == 0 || t.level == 4);
        }
        assert!(l.layers[0].tiles.iter().all(|t| t.support_len() == 2));
    }

    #[test]
    fn tiles_cover_grid_exactly_once() {
        for d in (3..=11).step_by(2) {
            let l = layout(d).unwrap();
            let mut count = vec![vec![0; d]; d];
            count[l.center][l.center] += 1;
            let mut cells = 1;
            for layer in &l.layers {
                for t in &layer.tiles {
                    assert_eq!(t.support_len(), 2 * layer.k);
                    for (r, c) in t.cells() {
                        count[r][c] += 1;
                        cells += 1;
                    }
                }
            }
            assert_eq!(cells, d * d);
            assert!(count.iter().flatten().all(|&n| n == 1));
        }
    }

    #[test]
    fn d3_upb_states() {
        let u = upb(3, Variant::Real).unwrap();
        let want = [
            ([1.0, 0.0, 0.0], [1.0, -1.0, 0.0]),
            ([0.0, 0.0, 1.0], [0.0, 1.0, -1.0]),
            ([1.0, -1.0, 0.0], [0.0, 0.0, 1.0]),
            ([0.0, 1.0, -1.0], [1.0, 0.0, 0.0]),
        ];
        assert_eq!(u.members.len(), 4);
        for (s, (a, b)) in u.members.iter().zip(want) {
            assert_eq!(amps(&s.a), a);
            assert_eq!(amps(&s.b), b);
        }
        assert_eq!(amps(&u.stopper.a), [1.0; 3]);
        // DFT at k = 1 is the same set exactly
        assert_eq!(upb(3, Variant::Dft).unwrap().members, u.members);
    }

    #[test]
    fn d5_real_matches_listed_states() {
        let u = upb(5, Variant::Real).unwrap();
        assert_eq!(u.len(), 17);
        let lay = layout(5).unwrap();
        let inner = tile_states(&lay, 1, Variant::Real).unwrap();
        let want_inner = [
            ([0., 1., 0., 0., 0.], [0., 1., -1., 0., 0.]),
            ([0., 0., 0., 1., 0.], [0., 0., 1., -1., 0.]),
            ([0., 1., -1., 0., 0.], [0., 0., 0., 1., 0.]),
            ([0., 0., 1., -1., 0.], [0., 1., 0., 0., 0.]),
        ];
        for (s, (a, b)) in inner.iter().zip(want_inner) {
            assert_eq!((amps(&s.a), amps(&s.b)), (a.to_vec(), b.to_vec()));
        }
        assert_eq!(inner[0].label, "psi13");
        let outer = tile_states(&lay, 2, Variant::Real).unwrap();
        assert_eq!(outer.len(), 12);
        assert_eq!(amps(&outer[0].b), [1., -1., 1., -1., 0.]);
        assert_eq!(amps(&outer[1].b), [1., 1., -1., -1., 0.]);
        assert_eq!(amps(&outer[5].b), [0., 1., -1., -1., 1.]);
        assert_eq!(amps(&outer[11].a), [0., 1., -1., -1., 1.]);
        assert_eq!(amps(&outer[11].b), [1., 0., 0., 0., 0.]);
        assert_eq!(outer[11].label, "psi12");
        assert_eq!(u.members[..12], outer[..]);
    }

    #[test]
    fn d7_dft_outer_layer() {
        let lay = layout(7).unwrap();
        let states = tile_states(&lay, 3, Variant::Dft).unwrap();
        assert_eq!(states.len(), 20);
        let mut all = states.clone();
        all.push(stopper(7).unwrap());
        assert!(max_offdiag(&all) < 1e-12);
    }

    #[test]
    fn tile_states_rejects_bad_layer() {
        let lay = layout(5).unwrap();
        assert!(tile_states(&lay, 0, Variant::Real).is_err());
        assert!(tile_states(&lay, 3, Variant::Real).is_err());
    }

    #[test]
    fn missing_states_d3() {
        let m = missing_states(&layout(3).unwrap());
        let want = [
            ([1., 0., 0.], [1., 1., 0.]),
            ([0., 0., 1.], [0., 1., 1.]),
            ([1., 1., 0.], [0., 0., 1.]),
            ([0., 1., 1.], [1., 0., 0.]),
            ([0., 1., 0.], [0., 1., 0.]),
        ];
        for (s, (a, b)) in m.iter().zip(want) {
            assert_eq!((amps(&s.a), amps(&s.b)), (a.to_vec(), b.to_vec()));
        }
        assert_eq!(m[4].label, "psi9");
    }

    #[test]
    fn missing_states_d5() {
        let m = missing_states(&layout(5).unwrap());
        assert_eq!(m.len(), 9);
        assert_eq!(m[0].label, "psi17");
        assert_eq!(amps(&m[0].b), [1., 1., 1., 1., 0.]);
        assert_eq!(m[8].label, "psi25");
        assert_eq!(m[8].provenance, Provenance::Central);
        assert_eq!(amps(&m[8].a), [0., 0., 1., 0., 0.]);
    }

    #[test]
    fn missing_states_block_only_the_stopper() {
        for d in (3..=11).step_by(2) {
            let lay = layout(d).unwrap();
            let missing = missing_states(&lay);
            assert_eq!(missing.len(), 2 * d - 1);
            let s = stopper(d).unwrap();
            for variant in [Variant::Dft, Variant::Real] {
                let u = upb(d, variant).unwrap();
                for m in &missing {
                    for member in &u.members {
                        assert!(m.inner(member).norm() < 1e-12);
                    }
                }
            }
            for m in &missing {
                // integer overlap: product of the two factor sums
                let direct: f64 = m.a.amplitudes().iter().map(|z| z.re).sum::<f64>()
                    * m.b.amplitudes().iter().map(|z| z.re).sum::<f64>();
                assert!((m.inner(&s).re - direct).abs() < 1e-12);
                assert!(direct > 0.5);
            }
        }
    }

    #[test]
    fn stopper_norm() {
        for d in [3, 5, 7] {
            let s = stopper(d).unwrap();
            assert!((s.inner(&s).re - (d * d) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn upb_counts() {
        for (d, n) in [(3, 5), (5, 17), (7, 37), (9, 65)] {
            assert_eq!(upb(d, Variant::Dft).unwrap().len(), n);
            assert_eq!(upb(d, Variant::Real).unwrap().len(), n);
        }
    }

    #[test]
    fn full_gram_is_diagonal() {
        for d in (3..=11).step_by(2) {
            for variant in [Variant::Dft, Variant::Real] {
                assert!(max_offdiag(&upb(d, variant).unwrap().all_states()) < 1e-12, "d={d} {variant}");
            }
        }
    }

    #[test]
    fn any_within_tile_basis_gives_orthogonal_set() {
        use rand::{Rng, SeedableRng};
        let rng = std::cell::RefCell::new(rand_chacha::ChaCha8Rng::seed_from_u64(1));
        // random orthonormal basis of the all-ones complement via Gram–Schmidt
        let random_basis = |n: usize| {
            let mut rng = rng.borrow_mut();
            let mut vs = vec![Ket::uniform(n, 0, n - 1)];
            for _ in 0..n + 3 {
                vs.push(Ket::new(
                    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect(),
                ));
            }
            crate::linalg::gram_schmidt(&vs)[1..].iter().map(|k| k.amplitudes().to_vec()).collect::<Vec<_>>()
        };
        for d in [5, 7, 9] {
            let u = upb_with(d, Variant::Dft, &random_basis).unwrap();
            assert_eq!(u.len(), (d - 1) * (d - 1) + 1);
            assert!(max_offdiag(&u.all_states()) < 1e-12);
        }
    }

    #[test]
    fn copb_spans_everything() {
        for d in (3..=11).step_by(2) {
            for variant in [Variant::Dft, Variant::Real] {
                let c = copb(d, variant).unwrap();
                assert_eq!(c.len(), d * d);
                let gram = ComplexMatrix::from_fn(c.len(), c.len(), |i, j| c[i].normalized_inner(&c[j]));
                assert_eq!(numeric_rank(&gram, RANK_TOL), d * d);
            }
        }
    }

    #[test]
    fn upb_json_shape() {
        let u = upb(3, Variant::Real).unwrap();
        let v: serde_json::Value = serde_json::to_value(&u).unwrap();
        assert_eq!(v["d"], 3);
        assert_eq!(v["variant"], "real");
        assert_eq!(v["members"].as_array().unwrap().len(), 4);
        assert_eq!(v["members"][0]["provenance"]["kind"], "tile");
        assert_eq!(v["members"][0]["provenance"]["tile"], "top");
        assert_eq!(v["stopper"]["label"], "S");
        assert_eq!(v["stopper"]["a"]["dim"], 3);
        let back: Upb = serde_json::from_value(v).unwrap();
        assert_eq!(back, u);
    }
}
