import json
import os

import scirtm.file.text


def read(file_path: os.PathLike, encoding: str = "utf-8") -> dict:
    """
    Reads a JSON document, such as a saved run configuration.

    Args:
        file_path (os.PathLike): The path to the JSON file.
        encoding (str): The encoding to use. Defaults to "utf-8".
    Returns:
        dict: The parsed document.
    """
    content = scirtm.file.text.read(file_path, encoding)
    return json.loads(content)


def write(
    file_path: os.PathLike, data: dict, encoding: str = "utf-8", indent: int = 4
) -> None:
    """
    Writes a dictionary as JSON with sorted keys and a trailing newline.

    Args:
        file_path (os.PathLike): The path to the JSON file.
        data (dict): The dictionary to write.
        encoding (str): The encoding to use. Defaults to "utf-8".
        indent (int): Indentation width. Defaults to 4.
    """
    content = json.dumps(data, ensure_ascii=False, indent=indent, sort_keys=True)
    scirtm.file.text.write(file_path, content + "\n", encoding)
