import os


def exists(file_path: os.PathLike) -> bool:
    """
    Checks whether a regular file exists at the given path.

    Args:
        file_path (os.PathLike): The path to the file.
    Returns:
        bool: True for an existing file, False for directories or missing paths.
    """
    return os.path.isfile(file_path)
