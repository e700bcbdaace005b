"""Transfer RL lab: binary-dynamics inference, dynamics-aligned embeddings, neighbor-count exploration."""

__version__ = "0.1.0"
