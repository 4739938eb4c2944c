"""
Benchmark report: per-model accuracy and wall times for the raw and
preprocessed pathways, as CSV, an aligned text table, a metadata YAML
and an optional bar chart.
"""
import pandas as pd
import yaml

from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Sequence, Union

from .constants import REPORT_SCHEMA
from .errors import NumtaprepError

PATHWAYS = ('raw', 'preprocessed')
COLUMNS = ['model', 'pathway', 'accuracy', 'fit_seconds', 'predict_seconds',
           'n_train', 'n_test', 'config_hash']
NOT_IMPLEMENTED = 'not implemented'

PathLike = Union[str, Path]


class BenchRow(NamedTuple):
    model: str
    pathway: str
    accuracy: float
    fit_seconds: float
    predict_seconds: float
    n_train: int
    n_test: int
    config_hash: str


class BenchReport(object):
    def __init__(self, rows: Sequence[BenchRow] = (), meta: Dict[str, Any] = None,
                 reserved: Sequence[str] = ()):
        self.rows: List[BenchRow] = list(rows)
        self.meta = dict(meta or {})
        self.reserved = list(reserved)

    def add(self, row: BenchRow):
        if row.pathway not in PATHWAYS:
            raise ValueError(f'unknown pathway {row.pathway}')
        if not 0.0 <= row.accuracy <= 1.0:
            raise ValueError(f'accuracy {row.accuracy} outside [0, 1]')
        if any(r.model == row.model and r.pathway == row.pathway for r in self.rows):
            raise ValueError(f'duplicate row for {row.model}/{row.pathway}')
        self.rows.append(row)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r._asdict() for r in self.rows], columns=COLUMNS)

    def accuracy(self, model: str, pathway: str) -> float:
        for r in self.rows:
            if r.model == model and r.pathway == pathway:
                return r.accuracy
        raise KeyError((model, pathway))

    def write_csv(self, path: PathLike):
        with open(path, 'w', newline='') as f:
            f.write(f'# schema={REPORT_SCHEMA}\n')
            self.to_frame().to_csv(f, index=False)

    @staticmethod
    def read_csv(path: PathLike) -> 'BenchReport':
        with open(path) as f:
            first = f.readline().strip()
            if first != f'# schema={REPORT_SCHEMA}':
                raise NumtaprepError(f'{path}: unsupported report schema line "{first}"')
            frame = pd.read_csv(f, dtype={'config_hash': str})
        if list(frame.columns) != COLUMNS:
            raise NumtaprepError(f'{path}: unexpected report columns {list(frame.columns)}')
        return BenchReport([BenchRow(**rec) for rec in frame.to_dict('records')])

    def to_text(self) -> str:
        """
        One line per model with accuracy, fit and predict time for
        both pathways; reserved models are listed as not implemented.
        """
        frame = self.to_frame()
        models = list(dict.fromkeys(frame['model'])) + [m for m in self.reserved]
        table = pd.DataFrame(index=models)
        for metric, label, fmt in (('accuracy', 'accuracy', '{:.5f}'),
                                   ('fit_seconds', 'fit s', '{:.3f}'),
                                   ('predict_seconds', 'predict s', '{:.3f}')):
            for pathway in PATHWAYS:
                sub = frame[frame['pathway'] == pathway].set_index('model')[metric]
                table[f'{label} ({pathway})'] = [
                    fmt.format(sub[m]) if m in sub.index else NOT_IMPLEMENTED for m in models]
        table.index.name = 'model'
        return table.to_string()

    def write_meta(self, path: PathLike):
        with open(path, 'w') as f:
            yaml.safe_dump(self.meta, f, sort_keys=True)

    def plot(self, path: PathLike):
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt
        import seaborn as sns

        fig, ax = plt.subplots(figsize=(7, 4))
        sns.barplot(data=self.to_frame(), x='model', y='accuracy', hue='pathway',
                    hue_order=list(PATHWAYS), ax=ax)
        ax.set_ylim(0, 1)
        ax.set_title('Accuracy before and after preprocessing')
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
