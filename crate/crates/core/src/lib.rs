pub mod convexity;
pub mod error;
pub mod expr;
pub mod fracto;
pub mod independence;
pub mod random;
pub mod registry;
pub mod report;
pub mod space;
pub mod spacefile;
pub mod suites;
pub mod sphere;
pub mod zline;

pub use convexity::{intersect_convexities, make_convexity, AxiomReport, BaseHull, Convexity};
pub use error::{Error, Result};
pub use fracto::{is_multiconvex, Block, Exactness, Fractoconvexity};
pub use space::{ElemSet, GroundSpace, SetFamily, DEFAULT_CAP};
pub use expr::{parse_expr, FractoExpr};
pub use registry::ConvexSpace;
pub use independence::{
    condition_3_1, independence_domain, is_conically_independent, pair_hull, verify_lemma1,
    verify_prop3, ConicalScan, ConicalWitness, IndependenceReport,
};
pub use report::{Report, Status};
pub use zline::{build_zline, check_prop4, f4_members, ZLineModel};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/overview.md")]
pub mod book_overview {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/convexities.md")]
pub mod book_convexities {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/fractoconvexities.md")]
pub mod book_fractoconvexities {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/algebra.md")]
pub mod book_algebra {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/independence.md")]
pub mod book_independence {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/zline.md")]
pub mod book_zline {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/sphere.md")]
pub mod book_sphere {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod book_cli {}
