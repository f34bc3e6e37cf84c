import json
import logging

from django.core.files.base import ContentFile
from django.core.files.storage import FileSystemStorage

from pathfinder.errors import DataError

Logger = logging.getLogger('pathfinder.storage')


class ArtifactStorage(FileSystemStorage):
    # Stage outputs are rewritten in place; the default storage would rename on collision.
    def __init__(self, location):
        super(ArtifactStorage, self).__init__(location=location, base_url='')
        self.base_url = None

    def get_available_name(self, name, max_length=None):
        if self.exists(name):
            self.delete(name)
        return name

    def save_bytes(self, name, data):
        try:
            saved = self.save(name, ContentFile(data))
        except OSError as e:
            raise DataError('cannot write artifact (%s)' % e.strerror, self.path(name))
        Logger.debug('Wrote %s (%d bytes)' % (self.path(saved), len(data)))
        return saved

    def save_text(self, name, text):
        return self.save_bytes(name, text.encode('utf-8'))

    def save_json(self, name, payload):
        return self.save_text(name, dumps_canonical(payload, indent=2) + '\n')

    def read_bytes(self, name):
        try:
            with self.open(name, 'rb') as f:
                return f.read()
        except OSError as e:
            raise DataError('cannot read artifact (%s)' % e.strerror, self.path(name))

    def read_text(self, name):
        return self.read_bytes(name).decode('utf-8')

    def read_json(self, name):
        try:
            return json.loads(self.read_text(name))
        except ValueError as e:
            raise DataError('malformed JSON (%s)' % e, self.path(name))


def dumps_canonical(payload, indent=None):
    return json.dumps(payload, sort_keys=True, indent=indent, separators=(',', ': ') if indent else (',', ':'))
