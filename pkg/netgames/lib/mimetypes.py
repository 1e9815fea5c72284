""" Mime type data
"""

MIME_TYPES = {
    'csv': "text/csv",
    'json': "application/json",
    'npz': "application/octet-stream",
    'yaml': "application/yaml",
    'log': "text/plain",
}
