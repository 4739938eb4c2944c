import os
import struct
import tempfile
import unittest
import numpy as np

from numtaprep.errors import ModelFormatError, ModelVersionError, UnsupportedModelType
from numtaprep.learners import (IMPLEMENTED_MODELS, decode_model, encode_model, get_model,
                                load_model, save_model)


class TestContainer(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        rng = np.random.default_rng(7)
        cls.X = rng.random((60, 16))
        cls.y = np.arange(60) % 4
        cls.Q = rng.random((15, 16))
        params = {'pca': {'n_components': 5}, 'logreg': {'epochs': 30}, 'knn': {'k': 3}}
        cls.models = {name: get_model(name, params).fit(cls.X, cls.y) for name in IMPLEMENTED_MODELS}

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def test_loaded_models_predict_the_same(self):
        for name, model in self.models.items():
            save_model(model, self.path(name))
            loaded = load_model(self.path(name))
            self.assertEqual(loaded.name, name)
            np.testing.assert_array_equal(loaded.predict(self.Q), model.predict(self.Q), err_msg=name)

    def test_saving_is_deterministic(self):
        model = self.models['tree']
        save_model(model, self.path('a'))
        save_model(model, self.path('b'))
        with open(self.path('a'), 'rb') as fa, open(self.path('b'), 'rb') as fb:
            self.assertEqual(fa.read(), fb.read())

    def test_field_kinds(self):
        state = {'none': None, 'int': -3, 'float': 0.25, 'str': 'knn',
                 'arr': np.arange(6, dtype=np.int32).reshape(2, 3)}
        tag, back = decode_model(encode_model('demo', state))
        self.assertEqual(tag, 'demo')
        self.assertEqual({k: v for k, v in back.items() if k != 'arr'},
                         {'none': None, 'int': -3, 'float': 0.25, 'str': 'knn'})
        np.testing.assert_array_equal(back['arr'], state['arr'])
        self.assertEqual(back['arr'].dtype, np.int32)

    def test_truncated(self):
        data = encode_model('knn', self.models['knn'].get_state())
        with self.assertRaises(ModelFormatError):
            decode_model(data[:-1])
        with self.assertRaises(ModelFormatError):
            decode_model(data + b'\x00')

    def test_bad_magic(self):
        with self.assertRaises(ModelFormatError):
            decode_model(b'NOPE' + b'\x00' * 20)

    def test_version(self):
        data = bytearray(encode_model('knn', {'k': 1}))
        data[4:6] = struct.pack('<H', 2)
        with self.assertRaises(ModelVersionError):
            decode_model(bytes(data))

    def test_missing_fields(self):
        with open(self.path('knn'), 'wb') as f:
            f.write(encode_model('knn', {'k': 1}))
        with self.assertRaises(ModelFormatError):
            load_model(self.path('knn'))

        for name, model in self.models.items():
            state = model.get_state()
            for field in sorted(state):
                partial = {k: v for k, v in state.items() if k != field}
                with open(self.path(name), 'wb') as f:
                    f.write(encode_model(name, partial))
                with self.assertRaises(ModelFormatError, msg=f'{name} without {field}'):
                    load_model(self.path(name))

    def test_unknown_tag(self):
        with open(self.path('m'), 'wb') as f:
            f.write(encode_model('svm', {}))
        with self.assertRaises(UnsupportedModelType):
            load_model(self.path('m'))

if __name__ == '__main__':
    unittest.main()
