import os
from pathlib import Path


def read(file_path: os.PathLike, encoding: str = "utf-8") -> str:
    """
    Reads a whole text file.

    Args:
        file_path (os.PathLike): The path to the text file.
        encoding (str): The encoding to use. Defaults to "utf-8".
    Returns:
        str: The content of the file.
    """
    with open(file_path, "r", encoding=encoding, newline="") as file:
        return file.read()


def write(file_path: os.PathLike, content: str, encoding: str = "utf-8") -> None:
    """
    Writes a string to a text file, creating parent directories.

    Line endings are written exactly as given, so output is identical on
    every platform.

    Args:
        file_path (os.PathLike): The path to the text file.
        content (str): The content to write.
        encoding (str): The encoding to use. Defaults to "utf-8".
    """
    write_path = Path(file_path)
    write_path.parent.mkdir(parents=True, exist_ok=True)
    with open(write_path, "w", encoding=encoding, newline="") as file:
        file.write(content)
