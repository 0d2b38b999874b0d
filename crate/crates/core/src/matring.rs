//! Matrix rings `M_n(D)` over the supported domains and finite products of them.
//!
//! Modules over `M_n(D)` are analyzed through the column equivalence with `D`-modules:
//! a left `M_n(D)`-module `M` corresponds to the `D`-module `e11 * M`. For a
//! presentation `R^g / (sum of R * r_i)` with block rows `r_i`, the corresponding base
//! module has `n*g` generators and, for every block row, the `n` scalar rows obtained by
//! flattening its blocks.

use thiserror::Error;

use crate::arith::RingTag;
use crate::modpid::{structure, uniform_dimension, ModError, Presentation, StructureDescriptor};
use crate::smith::MatrixOverDomain;
use crate::taxonomy::{
    self, citation, ks_certify, KsCertificate, Summand, SummandTag, Verdict, VirtualError,
    VsDecomposition,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatringError {
    #[error("column index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("matrix size must be at least 1")]
    EmptyMatrixRing,
    #[error("product ring needs at least one component")]
    EmptyProduct,
    #[error("block shape mismatch: {0}")]
    BlockShape(String),
    #[error("module component {index} is over {found:?}, expected {expected:?}")]
    ComponentMismatch { index: usize, expected: MatrixRingSpec, found: MatrixRingSpec },
    #[error(transparent)]
    Mod(#[from] ModError),
    #[error(transparent)]
    Virtual(#[from] VirtualError),
}

/// `M_n(base)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixRingSpec {
    base: RingTag,
    n: usize,
}

impl MatrixRingSpec {
    pub fn new(n: usize, base: RingTag) -> Result<Self, MatringError> {
        if n == 0 {
            return Err(MatringError::EmptyMatrixRing);
        }
        Ok(MatrixRingSpec { base, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> RingTag {
        self.base
    }
}

/// `prod M_{n_i}(D_i)`, kept sorted by `(base, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductRingSpec {
    components: Vec<MatrixRingSpec>,
}

impl ProductRingSpec {
    pub fn new(mut components: Vec<MatrixRingSpec>) -> Result<Self, MatringError> {
        if components.is_empty() {
            return Err(MatringError::EmptyProduct);
        }
        components.sort();
        Ok(ProductRingSpec { components })
    }

    pub fn components(&self) -> &[MatrixRingSpec] {
        &self.components
    }
}

/// A finitely presented left module over `M_n(base)`: `g` generators and block rows of
/// `n x n` blocks, stored flattened as an `(rows*n) x (g*n)` base matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatModPresentation {
    spec: MatrixRingSpec,
    generators: usize,
    flattened: MatrixOverDomain,
}

impl MatModPresentation {
    /// `blocks[i][j]` is the `n x n` block of relation `i` at generator `j`.
    pub fn from_blocks(
        spec: MatrixRingSpec,
        generators: usize,
        blocks: &[Vec<MatrixOverDomain>],
    ) -> Result<Self, MatringError> {
        let n = spec.n;
        let mut flat = MatrixOverDomain::zero(spec.base, blocks.len() * n, generators * n);
        for (i, row) in blocks.iter().enumerate() {
            if row.len() != generators {
                return Err(MatringError::BlockShape(format!(
                    "relation {i} has {} blocks for {generators} generators",
                    row.len()
                )));
            }
            for (j, block) in row.iter().enumerate() {
                if block.rows() != n || block.cols() != n || block.ring() != spec.base {
                    return Err(MatringError::BlockShape(format!(
                        "block ({i}, {j}) is {}x{} over {}, expected {n}x{n} over {}",
                        block.rows(),
                        block.cols(),
                        block.ring(),
                        spec.base
                    )));
                }
                for a in 0..n {
                    for b in 0..n {
                        flat.set(i * n + a, j * n + b, block.get(a, b).clone());
                    }
                }
            }
        }
        Ok(MatModPresentation { spec, generators, flattened: flat })
    }

    /// Free module `R^g`.
    pub fn free(spec: MatrixRingSpec, generators: usize) -> Self {
        MatModPresentation {
            spec,
            generators,
            flattened: MatrixOverDomain::zero(spec.base, 0, generators * spec.n),
        }
    }

    /// Every relation block is `d * I_n` for the given diagonal entry of a base
    /// presentation; used to lift a base module to the matrix ring.
    pub fn scalar_lift(spec: MatrixRingSpec, base: &Presentation) -> Result<Self, MatringError> {
        let n = spec.n;
        let rel = base.relations();
        let blocks: Vec<Vec<MatrixOverDomain>> = (0..rel.rows())
            .map(|i| {
                (0..rel.cols())
                    .map(|j| MatrixOverDomain::diagonal(spec.base, n, n, &vec![rel.get(i, j).clone(); n]))
                    .collect()
            })
            .collect();
        Self::from_blocks(spec, base.generators(), &blocks)
    }

    pub fn spec(&self) -> MatrixRingSpec {
        self.spec
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relation_count(&self) -> usize {
        self.flattened.rows() / self.spec.n
    }

    /// Block `(i, j)` of the relation matrix.
    pub fn block(&self, i: usize, j: usize) -> MatrixOverDomain {
        let n = self.spec.n;
        let mut m = MatrixOverDomain::zero(self.spec.base, n, n);
        for a in 0..n {
            for b in 0..n {
                m.set(a, b, self.flattened.get(i * n + a, j * n + b).clone());
            }
        }
        m
    }
}

/// The base presentation corresponding to a matrix-ring module.
pub fn transport_to_base(mp: &MatModPresentation) -> Presentation {
    Presentation::new(mp.spec.base, mp.generators * mp.spec.n, mp.flattened.clone())
        .expect("flattened shape matches generator count")
}

/// Transported descriptor of the `j`-th column left ideal of `M_n(D)` (1-based); it is
/// the regular `D`-module for every `j`.
pub fn column_module(spec: MatrixRingSpec, j: usize) -> Result<StructureDescriptor, MatringError> {
    if j == 0 || j > spec.n {
        return Err(MatringError::IndexOutOfRange { index: j, n: spec.n });
    }
    // R e_jj as a left module is n copies of the column vectors D^n; e11 picks the
    // single entry in row 1, leaving D.
    let mut blocks = MatrixOverDomain::identity(spec.base, spec.n);
    blocks.set(j - 1, j - 1, spec.base.zero());
    // relations kill every column but the j-th of the cyclic module R^1
    let column = MatModPresentation::from_blocks(spec, 1, &[vec![blocks]])?;
    Ok(structure(&transport_to_base(&column)))
}

pub fn is_virtually_simple_matmod(mp: &MatModPresentation) -> Result<bool, MatringError> {
    Ok(taxonomy::is_virtually_simple(&structure(&transport_to_base(mp)))?)
}

/// The regular module of `M_n(D)` as `n` column modules, with the pairing certificate
/// of two independent runs.
pub fn decompose_regular(spec: MatrixRingSpec) -> Result<(VsDecomposition, KsCertificate), MatringError> {
    let columns = (1..=spec.n)
        .map(|j| column_module(spec, j))
        .collect::<Result<Vec<_>, _>>()?;
    let regular = structure(&transport_to_base(&MatModPresentation::free(spec, 1)));
    let decomposition = VsDecomposition::new(
        columns
            .iter()
            .map(|c| Summand { descriptor: c.clone(), tag: SummandTag::FreeOfRankOneOverBase })
            .collect(),
    );
    if decomposition.reassemble(spec.base)? != regular {
        return Err(VirtualError::InvariantBreach("column modules do not reassemble R".into()).into());
    }
    let again = taxonomy::decompose_virtually_simple(&regular)?;
    let certificate = ks_certify(&columns, &again.descriptors())?;
    Ok((decomposition, certificate))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VDomainStatus {
    Field,
    NotVDomain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentReport {
    pub spec: MatrixRingSpec,
    pub v_domain_status: VDomainStatus,
    /// A finitely generated base module that is not virtually semisimple, `D/(p^2)`.
    pub non_vss_witness: Option<StructureDescriptor>,
    pub regular_decomposition: VsDecomposition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingReport {
    pub wedderburn_data: ProductRingSpec,
    /// Every module is a direct sum of simples.
    pub is_semisimple: bool,
    /// Every left module over the ring is completely virtually semisimple in the
    /// finitely generated regular sense: `R` is a sum of virtually simple modules.
    pub is_left_completely_vss: bool,
    /// Whether every finitely generated module is virtually semisimple.
    pub all_fg_modules_vss: bool,
    pub components: Vec<ComponentReport>,
    /// Union of the component decompositions of the regular module.
    pub regular_decomposition: Vec<(MatrixRingSpec, Summand)>,
    pub citations: Vec<&'static str>,
}

impl RingReport {
    pub fn v_domain_status(&self) -> Vec<VDomainStatus> {
        self.components.iter().map(|c| c.v_domain_status).collect()
    }
}

/// Ring-level analysis. No supported base is a field, so every component is a
/// non-V-domain: `D/(p^2)` is a finitely generated module that is not virtually
/// semisimple, and the ring is not semisimple. The regular module still splits into
/// virtually simple column modules.
pub fn ring_analyze(spec: &ProductRingSpec) -> Result<RingReport, MatringError> {
    let mut components = Vec::new();
    let mut regular = Vec::new();
    for &c in spec.components() {
        let (decomposition, _) = decompose_regular(c)?;
        let witness = StructureDescriptor::cyclic(&c.base.smallest_prime().pow(2))?;
        debug_assert!(!taxonomy::is_virtually_semisimple(&witness)?);
        regular.extend(decomposition.summands.iter().map(|s| (c, s.clone())));
        components.push(ComponentReport {
            spec: c,
            v_domain_status: VDomainStatus::NotVDomain,
            non_vss_witness: Some(witness),
            regular_decomposition: decomposition,
        });
    }
    let all_vdomains = components.iter().all(|c| c.v_domain_status == VDomainStatus::Field);
    Ok(RingReport {
        wedderburn_data: spec.clone(),
        is_semisimple: all_vdomains,
        is_left_completely_vss: true,
        all_fg_modules_vss: all_vdomains,
        components,
        regular_decomposition: regular,
        citations: vec![citation::MATRIX_RINGS, citation::V_DOMAIN, citation::SEMISIMPLE_RING],
    })
}

/// A module over a product ring, one matrix-ring module per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductModule {
    pub ring: ProductRingSpec,
    pub parts: Vec<MatModPresentation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductModuleReport {
    pub transported: Vec<StructureDescriptor>,
    pub per_component: Vec<Vec<Verdict>>,
    /// Predicate name and its value on the whole module.
    pub combined: Vec<(&'static str, bool)>,
    pub decomposition: Option<Vec<(MatrixRingSpec, Summand)>>,
}

impl ProductModule {
    pub fn new(ring: ProductRingSpec, parts: Vec<MatModPresentation>) -> Result<Self, MatringError> {
        if parts.len() != ring.components.len() {
            return Err(MatringError::BlockShape(format!(
                "{} module components for {} ring components",
                parts.len(),
                ring.components.len()
            )));
        }
        for (index, (p, c)) in parts.iter().zip(&ring.components).enumerate() {
            if p.spec != *c {
                return Err(MatringError::ComponentMismatch { index, expected: *c, found: p.spec });
            }
        }
        Ok(ProductModule { ring, parts })
    }
}

/// A module over `R1 x R2` is `M1 + M2` with `Mi` an `Ri`-module, and its submodules are
/// products of submodules. Hence the "every submodule/quotient" predicates hold iff
/// they hold in every component, and virtual simplicity needs exactly one non-zero
/// component, itself virtually simple.
pub fn analyze_product_module(m: &ProductModule) -> Result<ProductModuleReport, MatringError> {
    let transported: Vec<StructureDescriptor> =
        m.parts.iter().map(|p| structure(&transport_to_base(p))).collect();
    let mut per_component = Vec::new();
    for s in &transported {
        let (verdicts, failures) = taxonomy::all_verdicts(s);
        if let Some((_, e)) = failures.into_iter().next() {
            return Err(e.into());
        }
        per_component.push(verdicts);
    }
    let value = |name: &str, i: usize| {
        per_component[i].iter().find(|v| v.predicate == name).map(|v| v.value).unwrap_or(false)
    };
    let mut combined = Vec::new();
    for name in [
        "virtually_semisimple",
        "completely_virtually_semisimple",
        "fully_virtually_semisimple",
        "semisimple",
        "quasi_injective",
    ] {
        combined.push((name, (0..transported.len()).all(|i| value(name, i))));
    }
    let nonzero: Vec<usize> = (0..transported.len()).filter(|&i| !transported[i].is_zero()).collect();
    let vsimple = nonzero.len() == 1 && value("virtually_simple", nonzero[0]);
    combined.insert(0, ("virtually_simple", vsimple));

    let decomposition = if combined.iter().any(|(n, v)| *n == "virtually_semisimple" && *v) {
        let mut all = Vec::new();
        for (s, c) in transported.iter().zip(&m.ring.components) {
            let d = taxonomy::decompose_virtually_simple(s)?;
            all.extend(d.summands.into_iter().map(|x| (*c, x)));
        }
        Some(all)
    } else {
        None
    };
    Ok(ProductModuleReport { transported, per_component, combined, decomposition })
}

/// Uniform dimension of the regular module `M_n(D)` after transport.
pub fn regular_uniform_dimension(spec: MatrixRingSpec) -> Result<usize, MatringError> {
    Ok(uniform_dimension(&structure(&transport_to_base(&MatModPresentation::free(spec, 1))))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: RingTag = RingTag::Integers;

    fn zd(r: usize, f: &[i64]) -> StructureDescriptor {
        StructureDescriptor::new(Z, r, f.iter().map(|&v| Z.from_i64(v)).collect()).unwrap()
    }

    fn zblock(rows: &[&[i64]]) -> MatrixOverDomain {
        MatrixOverDomain::from_rows(
            Z,
            rows[0].len(),
            rows.iter().map(|r| r.iter().map(|&v| Z.from_i64(v)).collect()).collect(),
        )
        .unwrap()
    }

    fn m2z() -> MatrixRingSpec {
        MatrixRingSpec::new(2, Z).unwrap()
    }

    #[test]
    fn transport_examples() {
        let scalar = MatModPresentation::from_blocks(m2z(), 1, &[vec![zblock(&[&[2, 0], &[0, 2]])]]).unwrap();
        assert_eq!(structure(&transport_to_base(&scalar)), zd(0, &[2, 2]));
        let free = MatModPresentation::free(m2z(), 1);
        assert_eq!(structure(&transport_to_base(&free)), zd(2, &[]));
        let mixed = MatModPresentation::from_blocks(m2z(), 1, &[vec![zblock(&[&[2, 0], &[0, 3]])]]).unwrap();
        assert_eq!(structure(&transport_to_base(&mixed)), zd(0, &[6]));
    }

    #[test]
    fn column_module_examples() {
        let m3 = MatrixRingSpec::new(3, Z).unwrap();
        assert_eq!(column_module(m3, 2).unwrap(), zd(1, &[]));
        assert_eq!(column_module(MatrixRingSpec::new(1, Z).unwrap(), 1).unwrap(), zd(1, &[]));
        let f5 = RingTag::PolyOverPrimeField(5);
        let s = column_module(MatrixRingSpec::new(2, f5).unwrap(), 1).unwrap();
        assert_eq!(s, StructureDescriptor::free(f5, 1));
        assert_eq!(
            column_module(m3, 4),
            Err(MatringError::IndexOutOfRange { index: 4, n: 3 })
        );
        assert!(column_module(m3, 0).is_err());
    }

    #[test]
    fn virtually_simple_matmod_examples() {
        let mut b = MatrixOverDomain::identity(Z, 2);
        b.set(0, 0, Z.zero());
        let column = MatModPresentation::from_blocks(m2z(), 1, &[vec![b]]).unwrap();
        assert!(is_virtually_simple_matmod(&column).unwrap());
        let four = MatModPresentation::from_blocks(m2z(), 1, &[vec![zblock(&[&[4, 0], &[0, 4]])]]).unwrap();
        assert!(!is_virtually_simple_matmod(&four).unwrap());
        let five = MatModPresentation::from_blocks(m2z(), 1, &[vec![zblock(&[&[5, 0], &[0, 5]])]]).unwrap();
        assert_eq!(structure(&transport_to_base(&five)), zd(0, &[5, 5]));
        assert!(!is_virtually_simple_matmod(&five).unwrap());
    }

    #[test]
    fn regular_decomposition() {
        let m3 = MatrixRingSpec::new(3, Z).unwrap();
        let (d, cert) = decompose_regular(m3).unwrap();
        assert_eq!(d.descriptors(), vec![zd(1, &[]); 3]);
        assert_eq!(cert.pairing.len(), 3);
        let q = RingTag::PolyOverRationals;
        let (d, _) = decompose_regular(MatrixRingSpec::new(1, q).unwrap()).unwrap();
        assert_eq!(d.descriptors(), vec![StructureDescriptor::free(q, 1)]);
        assert_eq!(regular_uniform_dimension(m3).unwrap(), 3);
    }

    #[test]
    fn ring_report() {
        let spec = ProductRingSpec::new(vec![m2z(), MatrixRingSpec::new(1, Z).unwrap()]).unwrap();
        let r = ring_analyze(&spec).unwrap();
        assert!(r.is_left_completely_vss);
        assert!(!r.is_semisimple);
        assert!(!r.all_fg_modules_vss);
        assert_eq!(r.v_domain_status(), vec![VDomainStatus::NotVDomain; 2]);
        assert_eq!(r.regular_decomposition.len(), 3);
        assert_eq!(r.components[0].non_vss_witness, Some(zd(0, &[4])));

        let twice = ProductRingSpec::new(vec![m2z(), m2z()]).unwrap();
        let once = ProductRingSpec::new(vec![m2z()]).unwrap();
        assert_ne!(ring_analyze(&twice).unwrap().wedderburn_data, ring_analyze(&once).unwrap().wedderburn_data);

        let f5 = MatrixRingSpec::new(1, RingTag::PolyOverPrimeField(5)).unwrap();
        assert!(ring_analyze(&ProductRingSpec::new(vec![f5]).unwrap()).unwrap().is_left_completely_vss);
        assert_eq!(ProductRingSpec::new(vec![]), Err(MatringError::EmptyProduct));
    }

    #[test]
    fn component_order_is_canonical() {
        let f5 = MatrixRingSpec::new(2, RingTag::PolyOverPrimeField(5)).unwrap();
        let a = ProductRingSpec::new(vec![f5, m2z()]).unwrap();
        let b = ProductRingSpec::new(vec![m2z(), f5]).unwrap();
        assert_eq!(ring_analyze(&a).unwrap(), ring_analyze(&b).unwrap());
    }

    #[test]
    fn product_module_componentwise() {
        let f5 = RingTag::PolyOverPrimeField(5);
        let m2f5 = MatrixRingSpec::new(2, f5).unwrap();
        let ring = ProductRingSpec::new(vec![m2z(), m2f5]).unwrap();
        let col = {
            let mut b = MatrixOverDomain::identity(Z, 2);
            b.set(0, 0, Z.zero());
            MatModPresentation::from_blocks(m2z(), 1, &[vec![b]]).unwrap()
        };
        let zero_f5 = MatModPresentation::from_blocks(m2f5, 1, &[vec![MatrixOverDomain::identity(f5, 2)]]).unwrap();
        let m = ProductModule::new(ring.clone(), vec![col.clone(), zero_f5]).unwrap();
        let rep = analyze_product_module(&m).unwrap();
        assert!(rep.combined.contains(&("virtually_simple", true)));
        assert!(rep.combined.contains(&("virtually_semisimple", true)));
        assert_eq!(rep.decomposition.as_ref().unwrap().len(), 1);

        let free_f5 = MatModPresentation::free(m2f5, 1);
        let m = ProductModule::new(ring.clone(), vec![col, free_f5]).unwrap();
        let rep = analyze_product_module(&m).unwrap();
        assert!(rep.combined.contains(&("virtually_simple", false)));
        assert_eq!(rep.decomposition.unwrap().len(), 3);

        let wrong = ProductModule::new(ring, vec![MatModPresentation::free(m2f5, 1), MatModPresentation::free(m2z(), 1)]);
        assert!(matches!(wrong, Err(MatringError::ComponentMismatch { .. })));
    }

    #[test]
    fn scalar_lift_repeats_invariant_factors() {
        let base = zd(1, &[2, 6]).to_presentation();
        let lifted = MatModPresentation::scalar_lift(MatrixRingSpec::new(3, Z).unwrap(), &base).unwrap();
        assert_eq!(structure(&transport_to_base(&lifted)), zd(3, &[2, 2, 2, 6, 6, 6]));
    }
}
