//! Spectral grids and their derivative, integration and restriction operators.

mod chebyshev;
mod coefficients;
mod mapped;
mod quadrature;
mod spherical;

pub use chebyshev::{chebyshev, chebyshev_points, Grid1D};
pub use coefficients::chebyshev_coefficients;
pub use mapped::{mapped_thinfilm_grid, MappedThinFilmGrid};
pub use quadrature::{clenshaw_curtis, quadrature_matrix};
pub use spherical::{
    polar_grid, rational_radial_grid, spherical_operators, PolarGrid, RadialGrid, SphericalGrid,
};

#[cfg(test)]
mod tests;
