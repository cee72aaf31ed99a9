class AnnotateError(Exception):
    """Annotation job failure (bad inputs or an unloadable model)."""
