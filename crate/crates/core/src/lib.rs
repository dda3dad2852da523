#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod gauss_map;
pub mod geom;
pub mod io;
mod optim;
pub mod profile;
pub mod quadrature;
pub mod report;
pub mod surface;
pub mod tube;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/enclosing-balls.md")]
    pub mod enclosing_balls {}
    #[doc = include_str!("../../../book/src/curvature.md")]
    pub mod curvature {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    pub mod graphs {}
    #[doc = include_str!("../../../book/src/gauss-map.md")]
    pub mod gauss_map {}
    #[doc = include_str!("../../../book/src/tubes.md")]
    pub mod tubes {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
