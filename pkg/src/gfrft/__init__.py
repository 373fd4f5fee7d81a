"""SVD-based fractional spectral transforms on directed Cartesian product
graphs, with bandlimited denoising and benchmark tooling."""

from .graph import (
    DirectedGraph,
    HermitianLaplacian,
    StationTable,
    directed_line_graph,
    haversine_km,
    hermitian_laplacian,
    knn_graph,
    kronecker_sum,
    laplacian,
    load_edge_list,
    load_stations,
    product_adjacency,
    save_edge_list,
    save_stations,
    symmetrized_adjacency,
)
from .spectral import (
    ComplexPowerWarning,
    FractionalLaplacian,
    HermitianFractional,
    SpectralFactorization,
    fractional_laplacian,
    hermitian_fractional,
    load_factorization,
    m_product_fractional_laplacian,
    orthogonal_fractional_power,
    product_fractional_laplacian,
    save_factorization,
    svd_ascending,
)
from .transform import (
    GraphSignal,
    ProductFrequencyOrder,
    SpectrumPair,
    box_forward,
    box_inverse,
    dgfrft_forward,
    dgfrft_inverse,
    frequency_order,
    kron_forward,
    kron_inverse,
    m_box_forward,
    m_box_inverse,
    m_kron_forward,
    m_kron_inverse,
    save_spectrum,
    unvec,
    vec,
)
from .denoise import (
    BoundCheck,
    DenoiseReport,
    NoiseSpec,
    add_uniform_noise,
    aggregate_reports,
    bandlimit_box,
    bandlimit_dgfrft,
    bandlimit_kron,
    bandlimit_m_kron,
    box_bandlimit_bound,
    energy_fraction,
    kron_bandlimit_bound,
    metrics,
    trial_seed,
)
from .dataio import WeatherCube, day_matrix, load_weather, save_weather, synth_cube
from .estimators import BoxGFRFT, GFRFTDenoiser, HermitianGFRFT, KronGFRFT

__version__ = "0.1.0"

__all__ = [
    "BoundCheck",
    "BoxGFRFT",
    "ComplexPowerWarning",
    "DenoiseReport",
    "DirectedGraph",
    "FractionalLaplacian",
    "GFRFTDenoiser",
    "GraphSignal",
    "HermitianFractional",
    "HermitianGFRFT",
    "HermitianLaplacian",
    "KronGFRFT",
    "NoiseSpec",
    "ProductFrequencyOrder",
    "SpectralFactorization",
    "SpectrumPair",
    "StationTable",
    "WeatherCube",
    "add_uniform_noise",
    "aggregate_reports",
    "bandlimit_box",
    "bandlimit_dgfrft",
    "bandlimit_kron",
    "bandlimit_m_kron",
    "box_bandlimit_bound",
    "box_forward",
    "box_inverse",
    "day_matrix",
    "dgfrft_forward",
    "dgfrft_inverse",
    "directed_line_graph",
    "energy_fraction",
    "fractional_laplacian",
    "frequency_order",
    "haversine_km",
    "hermitian_fractional",
    "hermitian_laplacian",
    "knn_graph",
    "kron_bandlimit_bound",
    "kron_forward",
    "kron_inverse",
    "kronecker_sum",
    "laplacian",
    "load_edge_list",
    "load_factorization",
    "load_stations",
    "load_weather",
    "m_box_forward",
    "m_box_inverse",
    "m_kron_forward",
    "m_kron_inverse",
    "m_product_fractional_laplacian",
    "metrics",
    "orthogonal_fractional_power",
    "product_adjacency",
    "product_fractional_laplacian",
    "save_edge_list",
    "save_factorization",
    "save_spectrum",
    "save_stations",
    "save_weather",
    "svd_ascending",
    "symmetrized_adjacency",
    "synth_cube",
    "trial_seed",
    "unvec",
    "vec",
]
