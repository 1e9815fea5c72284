""" Storage classes. A Storage writes experiment artifacts (per seed run
records, learning curves, summaries and checkpoints) to some backend, and
reads them back when resuming.

Artifacts are addressed by a key and a filetype, e.g. ("seed_3", "csv").
"""
from io import BytesIO
import os

import boto3

from .lib.mimetypes import MIME_TYPES


class StorageUploadError(Exception):
    """ Error uploading to Amazon S3 """
    pass


class ArtifactNotFoundError(FileNotFoundError):
    """ No artifact was saved under the given key and filetype """
    pass


def _as_bytes(stream):
    """ Text artifacts are written as utf-8 """
    if isinstance(stream, str):
        return stream.encode("utf-8")
    if isinstance(stream, (bytes, bytearray)):
        return bytes(stream)
    if isinstance(stream, BytesIO):
        return stream.getvalue()
    raise NotImplementedError(f"Unable to store {type(stream).__name__}")


class Storage(object):
    """ Base class for storages.

    Subclasses implement write(name, data) and read(name) for a complete
    artifact name, e.g. "seed_3.csv".
    """

    def artifact_name(self, key, filetype):
        if filetype not in MIME_TYPES:
            raise ValueError(f"Unknown artifact type: {filetype}")
        return f"{key}.{filetype}"

    def save(self, key, stream, filetype, options={}):
        """
        :param key (str): Artifact key, e.g. "seed_3" or "summary"
        :param stream (BytesIO|str|bytes): The artifact. Strings are utf-8 encoded
        :param filetype (str): One of MIME_TYPES
        :param options (dict): Backend specific extras
        """
        self.write(self.artifact_name(key, filetype), _as_bytes(stream), options)

    def load(self, key, filetype):
        """
        :returns (BytesIO): the artifact saved under key and filetype
        """
        name = self.artifact_name(key, filetype)
        try:
            return BytesIO(self.read(name))
        except (KeyError, FileNotFoundError):
            raise ArtifactNotFoundError(f"No artifact named {name} in {self}")

    def write(self, name, data, options):
        raise NotImplementedError("The write method must be overwritten.")

    def read(self, name):
        raise NotImplementedError(f"{type(self).__name__} can not read artifacts.")

    def __repr__(self):
        return "<{cls}: {name}>".format(cls=type(self).__name__, name=str(id(self)))


class DictStorage(Storage):
    """ Keeps artifacts in a dictionary. Mostly useful for testing.

    Text artifacts are kept as str, everything else as BytesIO.
    """
    def __init__(self, dict):
        """
        :param dict (dict): Filled with {"key.filetype": artifact}
        """
        self.dict = dict

    def save(self, key, stream, filetype, options={}):
        name = self.artifact_name(key, filetype)
        if isinstance(stream, str):
            self.dict[name] = stream
        else:
            self.dict[name] = BytesIO(_as_bytes(stream))

    def read(self, name):
        return _as_bytes(self.dict[name])


class LocalStorage(Storage):
    """ Writes artifacts as files in a local directory.
    """
    def __init__(self, path="."):
        """
        :param path (str): Directory for the artifacts. Created on first write.
        """
        self.path = path

    def write(self, name, data, options):
        os.makedirs(self.path, exist_ok=True)
        # binary mode keeps csv line endings identical on every platform
        with open(os.path.join(self.path, name), "wb") as f:
            f.write(data)

    def read(self, name):
        with open(os.path.join(self.path, name), "rb") as f:
            return f.read()


class S3Storage(Storage):
    """ Writes artifacts to an S3 bucket, under an optional prefix.
    """
    def __init__(self, bucket, prefix=None):
        """
        :param bucket (str): An S3 bucket name.
        :param prefix (str): Optionally a S3 prefix (path), e.g. the experiment name
        """
        self.bucket_name = bucket
        self.prefix = prefix
        self._bucket = None

    @property
    def bucket(self):
        if self._bucket is None:
            self._bucket = boto3.resource('s3').Bucket(self.bucket_name)
        return self._bucket

    def __getstate__(self):
        # boto3 resources do not pickle, worker processes open their own
        return {"bucket_name": self.bucket_name, "prefix": self.prefix, "_bucket": None}

    def _object_key(self, name):
        if self.prefix is None:
            return name
        return self.prefix.strip("/") + "/" + name

    def write(self, name, data, options):
        """
        :param options (dict): Additional arguments to boto3's put_object, e.g. {'ACL': "private"}
        """
        args = {
            'Key': self._object_key(name),
            'Body': data,
            'ContentType': MIME_TYPES[name.rsplit(".", 1)[1]],
        }
        args.update(options)
        try:
            self.bucket.put_object(**args)
        except Exception as e:
            raise StorageUploadError(e)

    def read(self, name):
        client = self.bucket.meta.client
        try:
            obj = client.get_object(Bucket=self.bucket_name, Key=self._object_key(name))
        except client.exceptions.NoSuchKey:
            raise KeyError(name)
        return obj["Body"].read()


def open_storage(name, out="runs", s3_bucket=None):
    """ Storage for the artifacts of one experiment: an S3 prefix when a
    bucket is given, otherwise a sub directory of `out`.
    """
    if s3_bucket:
        return S3Storage(s3_bucket, prefix=name)
    return LocalStorage(os.path.join(out, name))
