"""shape3d: 3D model classification and retrieval.

Descriptors (shape indexes, landmark moments), semantic concept labeling via
1-D k-means, k-NN classification, a qualitative spatial fact store, and
weighted-distance ranking, persisted as a single JSON index and exposed over
a CLI and an HTTP API.
"""

from .descriptors import (
    DescriptorVector,
    Landmarks,
    MomentVector,
    ShapeIndexVector,
    analyze_mesh,
    descriptor_vector,
)
from .hull import ConvexHull, convex_hull, esd
from .mesh import (
    Measures,
    Mesh,
    compute_measures,
    diameter,
    principal_axes,
    rigid_transform,
    surface_area,
    surface_centroid,
    volume,
)
from .offio import parse_off, serialize_off
from .ontology import Fact, FactStore, qualitative_relations, spatial_entities
from .retrieval import (
    NormStats,
    RankedResult,
    RetrievalIndex,
    WeightProfile,
    load_index,
    normalize,
    parse_cla,
    precision_recall,
    retrieve,
    save_index,
    weighted_distance,
)
from .semantics import (
    Classifier,
    ConceptVocabulary,
    SemanticLabel,
    assign_concept,
    build_vocabulary,
    classify,
    label_model,
)

__version__ = "0.1.0"
