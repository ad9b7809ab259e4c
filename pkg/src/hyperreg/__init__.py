"""Graded hypergraph complexes, regularity certification, counting, embedding and Ramsey search."""

from .complex import (
    Complex,
    UniformHypergraph,
    VertexClasses,
    complete_complex,
    components,
    downward_closure,
    induced_subcomplex,
    max_degree,
    truncate,
)
from .counting import (
    Embedding,
    count_copies,
    count_copies_naive,
    count_extensions,
    expected_copies,
    expected_extensions,
    extension_statistics,
    verify_map,
)
from .density import (
    DensityVector,
    RegularityReport,
    certify_regularity,
    cliques,
    relative_density,
    tuple_density,
)
from .embedder import assign_classes, find_embedding, verify_embedding
from .errors import CapacityError, StructuralError, ValidationError
from .experiments import ExperimentConfig, run_experiment
from .random_models import (
    PartitionFamily,
    SliceSpec,
    generate_partition_family,
    generate_regular_complex,
    slice_level,
)
from .ramsey import (
    ColoredHypergraph,
    PipelineConfig,
    ReducedHypergraph,
    color_complete,
    find_clique,
    majority_color,
    ramsey_oracle,
    ramsey_pipeline,
    reduced_hypergraph,
)

__version__ = "0.1.0"
