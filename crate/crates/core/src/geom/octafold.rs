//! The Sierpinski octafold: four Sierpinski gaskets on alternating faces of
//! the octahedron, with the expanding map sending each 1-cell affinely onto
//! a whole gasket.
//!
//! Geometry is exact: points are cell addresses with dyadic barycentric
//! coordinates, and Euclidean coordinates are rational.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;
pub type Vec3 = [Q; 3];

/// Sign patterns `ε` of the faces `{ε_1 e_1, ε_2 e_2, ε_3 e_3}`; alternating
/// faces are those with `ε_1 ε_2 ε_3 = 1`.
pub const FACE_SIGNS: [[i64; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn half() -> Q {
    Q::new(1, 2)
}

/// `A_i y`: the contraction of the standard triangle towards `e_i`.
fn contract(i: usize, y: &Vec3) -> Vec3 {
    let mut out = [y[0] * half(), y[1] * half(), y[2] * half()];
    for (k, &yk) in y.iter().enumerate() {
        if k != i {
            out[i] += yk * half();
        }
    }
    out[i] += y[i] * half();
    out
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm_sq(a: &Vec3) -> Q {
    a.iter().map(|x| x * x).sum()
}

/// A cell: a face and a word over `{0, 1, 2}` (displayed `1..3`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OctafoldAddress {
    pub face: usize,
    pub word: Vec<usize>,
}

impl OctafoldAddress {
    pub fn new(face: usize, word: Vec<usize>) -> Result<Self> {
        if face >= 4 || word.iter().any(|&l| l >= 3) {
            return Err(Error::OctafoldGeometry(format!("invalid address face {face} word {word:?}")));
        }
        Ok(OctafoldAddress { face, word })
    }

    /// Parses `"F:w"` with `F ∈ 1..4` and `w` over `1..3`, e.g. `"1:12"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::OctafoldGeometry(format!("malformed octafold address {s:?}"));
        let (f, w) = s.split_once(':').unwrap_or((s, ""));
        let face: usize = f.trim().parse().map_err(|_| bad())?;
        let word = w
            .trim()
            .chars()
            .map(|c| c.to_digit(10).filter(|d| (1..=3).contains(d)).map(|d| d as usize - 1).ok_or_else(bad))
            .collect::<Result<Vec<_>>>()?;
        if !(1..=4).contains(&face) {
            return Err(bad());
        }
        OctafoldAddress::new(face - 1, word)
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }
}

impl std::fmt::Display for OctafoldAddress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:", self.face + 1)?;
        for l in &self.word {
            write!(f, "{}", l + 1)?;
        }
        Ok(())
    }
}

/// A point of a cell, in barycentric coordinates relative to the cell's
/// three vertices (ordered like the face vertices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OctafoldPoint {
    pub cell: OctafoldAddress,
    pub barycentric: [Q; 3],
}

impl OctafoldPoint {
    pub fn new(cell: OctafoldAddress, barycentric: [Q; 3]) -> Result<Self> {
        let sum: Q = barycentric.iter().sum();
        if sum != q(1) || barycentric.iter().any(|b| *b < q(0)) {
            return Err(Error::InvalidOctafoldPoint(format!("barycentric coordinates {barycentric:?}")));
        }
        Ok(OctafoldPoint { cell, barycentric })
    }

    pub fn vertex_of(cell: OctafoldAddress, k: usize) -> Self {
        let mut b = [q(0); 3];
        b[k] = q(1);
        OctafoldPoint { cell, barycentric: b }
    }
}

/// One row of the transition table: the 1-cell `j` of face `F` maps onto face
/// `target`, and letter `i` of the remaining address becomes `permutation[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub target: usize,
    pub permutation: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Octafold {
    table: [[Transition; 3]; 4],
}

impl Octafold {
    /// Builds the transition table from the face geometry and validates it
    /// against the midpoint rule `T(½(ε_a e_a + ε_b e_b)) = -ε_a ε_b e_c`.
    pub fn new() -> Result<Self> {
        check_faces()?;
        let other_face = |f: usize, j: usize| -> Result<usize> {
            let s = FACE_SIGNS[f][j];
            let mut it = (0..4).filter(|&g| g != f && FACE_SIGNS[g][j] == s);
            match (it.next(), it.next()) {
                (Some(g), None) => Ok(g),
                _ => Err(Error::OctafoldGeometry(format!("vertex {j} of face {f} is not in exactly two faces"))),
            }
        };
        let mut table = [[Transition { target: 0, permutation: [0, 1, 2] }; 3]; 4];
        for f in 0..4 {
            for j in 0..3 {
                let g = other_face(f, j)?;
                let mut permutation = [j; 3];
                for k in (0..3).filter(|&k| k != j) {
                    // the midpoint of v_j v_k is a vertex of both G(F, j) and
                    // G(F, k), hence their common vertex
                    let h = other_face(f, k)?;
                    let l = shared_vertex(g, h)?;
                    permutation[k] = l;
                }
                let mut sorted = permutation;
                sorted.sort_unstable();
                if sorted != [0, 1, 2] {
                    return Err(Error::OctafoldGeometry(format!("face {f} cell {j}: {permutation:?} is not a permutation")));
                }
                table[f][j] = Transition { target: g, permutation };
            }
        }
        let oct = Octafold { table };
        for m in oct.midpoints() {
            if !m.agrees {
                return Err(Error::OctafoldGeometry(format!("midpoint rule fails at {m:?}")));
            }
        }
        Ok(oct)
    }

    pub fn transition(&self, face: usize, letter: usize) -> Transition {
        self.table[face][letter]
    }

    /// `ε_i e_i`.
    pub fn face_vertex(&self, face: usize, i: usize) -> Vec3 {
        let mut v = [q(0); 3];
        v[i] = q(FACE_SIGNS[face][i]);
        v
    }

    /// Euclidean coordinates of a point.
    pub fn coordinates(&self, p: &OctafoldPoint) -> Vec3 {
        let mut y = p.barycentric;
        for &l in p.cell.word.iter().rev() {
            y = contract(l, &y);
        }
        let s = FACE_SIGNS[p.cell.face];
        [y[0] * s[0], y[1] * s[1], y[2] * s[2]]
    }

    /// The three vertices of a cell.
    pub fn cell_vertices(&self, cell: &OctafoldAddress) -> [Vec3; 3] {
        [0, 1, 2].map(|k| self.coordinates(&OctafoldPoint::vertex_of(cell.clone(), k)))
    }

    /// `T(F, j·w) = (G(F, j), π_{F,j}(w))`.
    pub fn shift(&self, cell: &OctafoldAddress) -> Result<OctafoldAddress> {
        let (&j, rest) = cell.word.split_first().ok_or(Error::EmptyOctafoldWord)?;
        let t = self.table[cell.face][j];
        Ok(OctafoldAddress { face: t.target, word: rest.iter().map(|&l| t.permutation[l]).collect() })
    }

    /// The image of a point under the affine map of its 1-cell.
    pub fn shift_point(&self, p: &OctafoldPoint) -> Result<OctafoldPoint> {
        let cell = self.shift(&p.cell)?;
        let perm = self.table[p.cell.face][p.cell.word[0]].permutation;
        let mut b = [q(0); 3];
        for i in 0..3 {
            b[perm[i]] = p.barycentric[i];
        }
        Ok(OctafoldPoint { cell, barycentric: b })
    }

    /// The twelve midpoints with their images, checked against the midpoint
    /// rule. Each midpoint is evaluated from both adjacent 1-cells.
    pub fn midpoints(&self) -> Vec<MidpointImage> {
        let mut out = Vec::new();
        for f in 0..4 {
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                let c = 3 - a - b;
                let from_a = OctafoldPoint::vertex_of(OctafoldAddress { face: f, word: vec![a] }, b);
                let from_b = OctafoldPoint::vertex_of(OctafoldAddress { face: f, word: vec![b] }, a);
                let point = self.coordinates(&from_a);
                let image_a = self.coordinates(&self.shift_point(&from_a).expect("depth 1"));
                let image_b = self.coordinates(&self.shift_point(&from_b).expect("depth 1"));
                let (ea, eb) = (FACE_SIGNS[f][a], FACE_SIGNS[f][b]);
                let mut expected = [q(0); 3];
                expected[c] = q(-ea * eb);
                out.push(MidpointImage {
                    face: f,
                    pair: (a, b),
                    point,
                    image: image_a,
                    expected,
                    agrees: image_a == expected && image_b == expected,
                });
            }
        }
        out
    }

    /// Applies each point's 1-cell map and compares squared distances.
    pub fn scaling_probe(&self, y: &OctafoldPoint, z: &OctafoldPoint) -> Result<ScalingProbe> {
        let before = norm_sq(&sub(&self.coordinates(y), &self.coordinates(z)));
        if before == q(0) {
            return Err(Error::DegeneratePair);
        }
        let ty = self.shift_point(y)?;
        let tz = self.shift_point(z)?;
        let after = norm_sq(&sub(&self.coordinates(&ty), &self.coordinates(&tz)));
        let ratio_sq = after / before;
        Ok(ScalingProbe {
            distance_sq_before: before,
            distance_sq_after: after,
            ratio_sq,
            ratio: (*ratio_sq.numer() as f64 / *ratio_sq.denom() as f64).sqrt(),
        })
    }

    /// Mass of every cell of `depth` against that of its image.
    pub fn measure_scaling(&self, depth: usize) -> Result<MeasureScaling> {
        let mut checked = 0;
        let mut failures = Vec::new();
        let mut midpoint_cells = 0;
        let mut midpoint_failures = 0;
        for cell in all_cells(depth) {
            let ratio = octafold_cell_measure(&self.shift(&cell)?)? / octafold_cell_measure(&cell)?;
            let touches = touches_midpoint(&cell);
            if touches {
                midpoint_cells += 1;
            }
            if ratio != q(3) {
                if touches {
                    midpoint_failures += 1;
                } else {
                    failures.push(cell.to_string());
                }
            }
            checked += 1;
        }
        Ok(MeasureScaling { depth, cells_checked: checked, failures, midpoint_cells, midpoint_failures })
    }
}

/// The common vertex index of two distinct alternating faces.
fn shared_vertex(f: usize, g: usize) -> Result<usize> {
    let common: Vec<usize> = (0..3).filter(|&i| FACE_SIGNS[f][i] == FACE_SIGNS[g][i]).collect();
    match common.as_slice() {
        [i] => Ok(*i),
        _ => Err(Error::OctafoldGeometry(format!("faces {f} and {g} share {} vertices", common.len()))),
    }
}

/// Faces pairwise share one vertex and every octahedron vertex lies on two
/// faces.
pub fn check_faces() -> Result<()> {
    for f in 0..4 {
        if FACE_SIGNS[f].iter().product::<i64>() != 1 {
            return Err(Error::OctafoldGeometry(format!("face {f} is not alternating")));
        }
        for g in f + 1..4 {
            shared_vertex(f, g)?;
        }
    }
    for i in 0..3 {
        for s in [-1, 1] {
            let n = (0..4).filter(|&f| FACE_SIGNS[f][i] == s).count();
            if n != 2 {
                return Err(Error::OctafoldGeometry(format!("vertex {s}e_{} lies on {n} faces", i + 1)));
            }
        }
    }
    Ok(())
}

/// Cells whose closure contains a midpoint of their face: `j·k^{d-1}` with
/// `k != j`.
pub fn touches_midpoint(cell: &OctafoldAddress) -> bool {
    match cell.word.split_first() {
        Some((&j, rest)) if !rest.is_empty() => {
            let k = rest[0];
            k != j && rest.iter().all(|&l| l == k)
        }
        _ => false,
    }
}

/// All `4·3^depth` cells of a given depth.
pub fn all_cells(depth: usize) -> Vec<OctafoldAddress> {
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..depth {
        words = words
            .into_iter()
            .flat_map(|w| (0..3).map(move |l| [w.as_slice(), &[l]].concat()))
            .collect();
    }
    (0..4).flat_map(|f| words.iter().map(move |w| OctafoldAddress { face: f, word: w.clone() })).collect()
}

/// Normalized Hausdorff measure of a cell: `(1/4)·3^{-depth}`.
pub fn octafold_cell_measure(cell: &OctafoldAddress) -> Result<Q> {
    let denom = 3i64
        .checked_pow(cell.depth() as u32)
        .and_then(|p| p.checked_mul(4))
        .ok_or_else(|| Error::OctafoldGeometry(format!("cell depth {} too large for exact measure", cell.depth())))?;
    Ok(Q::new(1, denom))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MidpointImage {
    pub face: usize,
    pub pair: (usize, usize),
    #[serde(serialize_with = "ser_vec3")]
    pub point: Vec3,
    #[serde(serialize_with = "ser_vec3")]
    pub image: Vec3,
    #[serde(serialize_with = "ser_vec3")]
    pub expected: Vec3,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingProbe {
    #[serde(serialize_with = "ser_q")]
    pub distance_sq_before: Q,
    #[serde(serialize_with = "ser_q")]
    pub distance_sq_after: Q,
    /// Exact squared ratio; the ratio is 2 exactly when this is 4.
    #[serde(serialize_with = "ser_q")]
    pub ratio_sq: Q,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureScaling {
    pub depth: usize,
    pub cells_checked: usize,
    /// Cells avoiding midpoints where `μ(TC) != 3 μ(C)`.
    pub failures: Vec<String>,
    /// Cells touching a midpoint, reported apart from the pass/fail count.
    pub midpoint_cells: usize,
    pub midpoint_failures: usize,
}

impl MeasureScaling {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_vec3<S: serde::Serializer>(v: &Vec3, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

/// The configuration of two points on the segments from the midpoint `m_12`
/// of face 1 towards `m_13` (inside 1-cell 11) and towards `m_23` (inside
/// 1-cell 12), both at fraction `t` of the segment. The segments meet at
/// angle `π/3`. Returns `(x, y, z)` with `x` the midpoint seen from cell 11.
pub fn straddling_configuration(t: Q) -> Result<(OctafoldPoint, OctafoldPoint, OctafoldPoint)> {
    let one = q(1);
    let c11 = OctafoldAddress { face: 0, word: vec![0] };
    let c12 = OctafoldAddress { face: 0, word: vec![1] };
    // cell 11 has vertices (v_1, m_12, m_13); cell 12 has (m_12, v_2, m_23)
    let x = OctafoldPoint::new(c11.clone(), [q(0), one, q(0)])?;
    let y = OctafoldPoint::new(c11, [q(0), one - t, t])?;
    let z = OctafoldPoint::new(c12, [one - t, q(0), t])?;
    Ok((x, y, z))
}

/// Two points on the segments from `m_12` towards `v_1` (inside 1-cell 11)
/// and towards `v_2` (inside 1-cell 12), at fraction `t`. The segments are
/// collinear before the map and meet at angle `π/3` after it, so the pair is
/// contracted relative to the factor 2 seen inside a cell.
pub fn collinear_configuration(t: Q) -> Result<(OctafoldPoint, OctafoldPoint, OctafoldPoint)> {
    let one = q(1);
    let c11 = OctafoldAddress { face: 0, word: vec![0] };
    let c12 = OctafoldAddress { face: 0, word: vec![1] };
    let x = OctafoldPoint::new(c11.clone(), [q(0), one, q(0)])?;
    let y = OctafoldPoint::new(c11, [t, one - t, q(0)])?;
    let z = OctafoldPoint::new(c12, [one - t, t, q(0)])?;
    Ok((x, y, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: i64, b: i64, c: i64, d: i64) -> Vec3 {
        [Q::new(a, d), Q::new(b, d), Q::new(c, d)]
    }

    #[test]
    fn contractions_match_matrices() {
        // columns of A_1: (1,0,0), (1/2,1/2,0), (1/2,0,1/2)
        assert_eq!(contract(0, &v(0, 1, 0, 1)), v(1, 1, 0, 2));
        assert_eq!(contract(0, &v(0, 0, 1, 1)), v(1, 0, 1, 2));
        assert_eq!(contract(0, &v(1, 0, 0, 1)), v(1, 0, 0, 1));
        assert_eq!(contract(1, &v(0, 0, 1, 1)), v(0, 1, 1, 2));
        assert_eq!(contract(2, &v(1, 0, 0, 1)), v(1, 0, 1, 2));
    }

    #[test]
    fn faces() {
        check_faces().unwrap();
    }

    #[test]
    fn table_is_derived_and_consistent() {
        let o = Octafold::new().unwrap();
        let t = o.transition(0, 0);
        assert_eq!(t.target, 1);
        assert_eq!(t.permutation, [0, 2, 1]);
        for f in 0..4 {
            for j in 0..3 {
                let t = o.transition(f, j);
                assert_ne!(t.target, f);
                assert_eq!(t.permutation[j], j);
                assert_eq!(FACE_SIGNS[t.target][j], FACE_SIGNS[f][j]);
            }
        }
        let m = o.midpoints();
        assert_eq!(m.len(), 12);
        assert!(m.iter().all(|m| m.agrees));
    }

    #[test]
    fn cell_vertices() {
        let o = Octafold::new().unwrap();
        let c = OctafoldAddress::parse("2:1").unwrap();
        // face (e_1, -e_2, -e_3), cell towards e_1
        assert_eq!(o.cell_vertices(&c), [v(1, 0, 0, 1), v(1, -1, 0, 2), v(1, 0, -1, 2)]);
        let d = OctafoldAddress::parse("1:12").unwrap();
        assert_eq!(o.cell_vertices(&d)[0], v(3, 1, 0, 4));
    }

    #[test]
    fn shift_behaviour() {
        let o = Octafold::new().unwrap();
        let c = OctafoldAddress::parse("1:1111").unwrap();
        let mut img = o.shift(&c).unwrap();
        assert_eq!(img, OctafoldAddress::parse("2:111").unwrap());
        for _ in 0..3 {
            img = o.shift(&img).unwrap();
        }
        assert_eq!(img.depth(), 0);
        assert_eq!(o.coordinates(&OctafoldPoint::vertex_of(img, 0)), v(1, 0, 0, 1));
        assert_eq!(o.shift(&OctafoldAddress::new(0, vec![]).unwrap()), Err(Error::EmptyOctafoldWord));
        // vertex fixed
        let p = OctafoldPoint::vertex_of(OctafoldAddress::parse("3:2").unwrap(), 1);
        assert_eq!(o.coordinates(&o.shift_point(&p).unwrap()), o.coordinates(&p));
    }

    #[test]
    fn images_of_cell_vertices_are_image_cell_vertices() {
        let o = Octafold::new().unwrap();
        for cell in all_cells(3) {
            let img = o.shift(&cell).unwrap();
            let mut expected = o.cell_vertices(&img).to_vec();
            let mut got: Vec<Vec3> = (0..3)
                .map(|k| o.coordinates(&o.shift_point(&OctafoldPoint::vertex_of(cell.clone(), k)).unwrap()))
                .collect();
            expected.sort();
            got.sort();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn measures() {
        assert_eq!(octafold_cell_measure(&OctafoldAddress::parse("1:").unwrap()).unwrap(), Q::new(1, 4));
        assert_eq!(octafold_cell_measure(&OctafoldAddress::parse("4:32").unwrap()).unwrap(), Q::new(1, 36));
        let total: Q = all_cells(2).iter().map(|c| octafold_cell_measure(c).unwrap()).sum();
        assert_eq!(total, q(1));
        let o = Octafold::new().unwrap();
        let r = o.measure_scaling(3).unwrap();
        assert!(r.passed());
        assert_eq!(r.cells_checked, 108);
        // j·k·k with k != j: 4 faces × 6
        assert_eq!(r.midpoint_cells, 24);
    }

    #[test]
    fn scaling_inside_a_cell() {
        let o = Octafold::new().unwrap();
        let c = OctafoldAddress::parse("2:31").unwrap();
        let y = OctafoldPoint::new(c.clone(), [Q::new(1, 4), Q::new(1, 4), Q::new(1, 2)]).unwrap();
        let z = OctafoldPoint::new(c, [Q::new(1, 8), Q::new(5, 8), Q::new(1, 4)]).unwrap();
        let p = o.scaling_probe(&y, &z).unwrap();
        assert_eq!(p.ratio_sq, q(4));
        assert_eq!(o.scaling_probe(&y, &y), Err(Error::DegeneratePair));
    }

    #[test]
    fn straddling_pair_distances() {
        // Independent computation: y = m12 + t(m13 - m12), z = m12 + t(m23 - m12)
        // map to -e3 + t(-e2 + e3) and -e3 + t(-e1 + e3); both segments have
        // length √2/2 before and √2 after, and meet at angle π/3 on both sides.
        let o = Octafold::new().unwrap();
        let t = Q::new(1, 8);
        let (x, y, z) = straddling_configuration(t).unwrap();
        assert_eq!(o.coordinates(&x), v(1, 1, 0, 2));
        let ty = o.coordinates(&o.shift_point(&y).unwrap());
        let tz = o.coordinates(&o.shift_point(&z).unwrap());
        assert_eq!(ty, [q(0), -t, t - q(1)]);
        assert_eq!(tz, [-t, q(0), t - q(1)]);
        assert_eq!(o.scaling_probe(&x, &y).unwrap().ratio_sq, q(4));
        assert_eq!(o.scaling_probe(&y, &z).unwrap().ratio_sq, q(4));
    }

    #[test]
    fn collinear_pair_is_not_doubled() {
        let o = Octafold::new().unwrap();
        let (x, y, z) = collinear_configuration(Q::new(1, 16)).unwrap();
        assert_eq!(o.scaling_probe(&x, &y).unwrap().ratio_sq, q(4));
        assert_eq!(o.scaling_probe(&x, &z).unwrap().ratio_sq, q(4));
        assert_eq!(o.scaling_probe(&y, &z).unwrap().ratio_sq, q(1));
    }

    #[test]
    fn address_parsing() {
        let a = OctafoldAddress::parse("3:213").unwrap();
        assert_eq!(a, OctafoldAddress { face: 2, word: vec![1, 0, 2] });
        assert_eq!(a.to_string(), "3:213");
        for bad in ["0:1", "5:", "1:4", "x"] {
            assert!(OctafoldAddress::parse(bad).is_err());
        }
    }
}
