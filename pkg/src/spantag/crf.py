"""Linear-chain conditional random field.

Log-linear model over per-position feature strings (from template
expansion) and optional label-transition features.  Inference is all
log-space: forward-backward for the partition function and marginals,
Viterbi (lowest-index tie-break) for decoding.  Training minimizes the
L2-regularized negative log-likelihood

    f(w) = -sum_s log p(y_s | x_s; w) + ||w||^2 / (2C)

with L-BFGS, so larger C means weaker regularization.
"""

from dataclasses import dataclass, field

import numpy as np

from . import optim
from .corpus import Document, encode_document
from .errors import ConfigError, NumericError, ParseError
from .features import FeatureTemplate, expand_sentence, feature_table, parse_template
from .schemes import Scheme, get_scheme

MODEL_FORMAT = "spantag-crf v1"
_TRANS_MARK = "_TRANS_"


@dataclass(frozen=True)
class TrainerConfig:
    C: float = 1.0
    eta: float = 1e-4
    max_iterations: int = 500
    lbfgs_memory: int = 10

    def __post_init__(self):
        for name in ("C", "eta", "max_iterations", "lbfgs_memory"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")


# --- lattice inference --------------------------------------------------

@dataclass
class Lattice:
    """Log-space scores: node (n, L); edge (n-1, L, L) or None."""
    node: np.ndarray
    edge: np.ndarray | None = None

    def __post_init__(self):
        self.node = np.asarray(self.node, dtype=float)
        if self.edge is not None:
            self.edge = np.asarray(self.edge, dtype=float)
            n, L = self.node.shape
            if self.edge.shape != (max(n - 1, 0), L, L):
                raise ValueError("edge/node shape mismatch")


def _logsumexp(a, axis):
    hi = np.max(a, axis=axis, keepdims=True)
    out = hi + np.log(np.sum(np.exp(a - hi), axis=axis, keepdims=True))
    return np.squeeze(out, axis=axis)


def forward_backward(lat: Lattice):
    """(logZ, node marginals (n,L), edge marginals (n-1,L,L) or None).

    Forward and backward partition functions agree to tight tolerance;
    the forward value is returned.
    """
    node, edge = lat.node, lat.edge
    n, L = node.shape
    if n == 0:
        return 0.0, np.zeros((0, L)), (None if edge is None
                                       else np.zeros((0, L, L)))
    alpha = np.empty((n, L))
    beta = np.empty((n, L))
    alpha[0] = node[0]
    for t in range(1, n):
        if edge is None:
            alpha[t] = node[t] + _logsumexp(alpha[t - 1], axis=0)
        else:
            alpha[t] = node[t] + _logsumexp(
                alpha[t - 1][:, None] + edge[t - 1], axis=0)
    beta[n - 1] = 0.0
    for t in range(n - 2, -1, -1):
        nb = node[t + 1] + beta[t + 1]
        if edge is None:
            beta[t] = _logsumexp(nb, axis=0)
        else:
            beta[t] = _logsumexp(edge[t] + nb[None, :], axis=1)
    log_z = float(_logsumexp(alpha[n - 1], axis=0))
    log_z_backward = float(_logsumexp(node[0] + beta[0], axis=0))
    if not np.isfinite(log_z) or abs(log_z - log_z_backward) > 1e-6 * max(
            1.0, abs(log_z)):
        raise NumericError(
            f"forward/backward disagree: {log_z} vs {log_z_backward}")
    marginals = np.exp(alpha + beta - log_z)
    edge_marginals = None
    if edge is not None:
        edge_marginals = np.exp(
            alpha[:-1, :, None] + edge
            + (node[1:] + beta[1:])[:, None, :] - log_z)
    return log_z, marginals, edge_marginals


def viterbi(lat: Lattice) -> list[int]:
    """Maximum-score label indices; ties resolved to the lowest index."""
    node, edge = lat.node, lat.edge
    n, L = node.shape
    if n == 0:
        return []
    delta = node[0].copy()
    back = np.zeros((n, L), dtype=np.intp)
    for t in range(1, n):
        if edge is None:
            prev = delta[:, None] + np.zeros((L, L))
        else:
            prev = delta[:, None] + edge[t - 1]
        back[t] = np.argmax(prev, axis=0)  # first max = lowest index
        delta = node[t] + np.max(prev, axis=0)
    path = [int(np.argmax(delta))]
    for t in range(n - 1, 0, -1):
        path.append(int(back[t][path[-1]]))
    path.reverse()
    return path


def sequence_score(lat: Lattice, labels: list[int]) -> float:
    node, edge = lat.node, lat.edge
    score = float(sum(node[t, y] for t, y in enumerate(labels)))
    if edge is not None:
        score += float(sum(edge[t - 1, labels[t - 1], labels[t]]
                           for t in range(1, len(labels))))
    return score


# --- feature alphabet ----------------------------------------------------

class FeatureAlphabet:
    """Dense weight indexing: feature-string x label, then label bigrams.

    Feature index f and label index y map to weight f*L + y; transition
    (a, b) maps to n_features*L + a*L + b when transitions are enabled.
    """

    def __init__(self, labels: tuple[str, ...], transitions: bool):
        self.labels = labels
        self.transitions = transitions
        self.feat_index: dict[str, int] = {}

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return len(self.feat_index)

    @property
    def dim(self) -> int:
        L = self.n_labels
        return self.n_features * L + (L * L if self.transitions else 0)

    def add(self, feature: str) -> int:
        return self.feat_index.setdefault(feature, len(self.feat_index))

    def feature_id(self, feature: str) -> int | None:
        return self.feat_index.get(feature)

    def index(self, fid: int, y: int) -> int:
        return fid * self.n_labels + y

    def trans_base(self) -> int:
        return self.n_features * self.n_labels

    def trans_index(self, a: int, b: int) -> int:
        return self.trans_base() + a * self.n_labels + b

    def feature_strings(self) -> list[str]:
        out = [""] * self.n_features
        for feat, fid in self.feat_index.items():
            out[fid] = feat
        return out


def build_alphabet(docs: list[Document], template: FeatureTemplate,
                   scheme: Scheme) -> FeatureAlphabet:
    """First-occurrence alphabet over every expanded feature string."""
    if not any(doc.sentences for doc in docs):
        raise ConfigError("cannot build an alphabet from an empty corpus")
    alphabet = FeatureAlphabet(scheme.labels, template.transitions)
    for doc in docs:
        for sentence in doc.sentences:
            table = feature_table(sentence)
            for feats in expand_sentence(template, table):
                for feat in feats:
                    alphabet.add(feat)
    return alphabet


# --- training instances ---------------------------------------------------

@dataclass
class Instance:
    """One sentence: per-position known-feature ids and gold label ids."""
    feats: list[list[int]]
    gold: list[int]


def _sentence_fids(sentence, template, alphabet, allow_unseen=False):
    table = feature_table(sentence)
    rows = []
    for feats in expand_sentence(template, table):
        fids = []
        for feat in feats:
            fid = alphabet.feature_id(feat)
            if fid is None:
                if not allow_unseen:
                    raise ConfigError(f"feature {feat!r} missing from alphabet")
                continue  # unseen at tag time: zero score
            fids.append(fid)
        rows.append(fids)
    return rows


def make_instances(docs: list[Document], template: FeatureTemplate,
                   alphabet: FeatureAlphabet, scheme: Scheme,
                   event_type: str) -> list[Instance]:
    label_id = {lab: y for y, lab in enumerate(scheme.labels)}
    instances = []
    for doc in docs:
        label_rows = encode_document(doc, scheme, event_type)
        for sentence, labels in zip(doc.sentences, label_rows):
            if not sentence.tokens:
                continue
            feats = _sentence_fids(sentence, template, alphabet)
            instances.append(Instance(feats, [label_id[lab] for lab in labels]))
    return instances


# --- objective: reference (per-sentence) path ------------------------------

def _unpack(weights, alphabet):
    L = alphabet.n_labels
    w_node = weights[:alphabet.n_features * L].reshape(alphabet.n_features, L)
    w_trans = None
    if alphabet.transitions:
        w_trans = weights[alphabet.trans_base():].reshape(L, L)
    return w_node, w_trans


def instance_lattice(inst: Instance, w_node, w_trans) -> Lattice:
    n = len(inst.feats)
    L = w_node.shape[1]
    node = np.zeros((n, L))
    for t, fids in enumerate(inst.feats):
        if fids:
            node[t] = w_node[fids].sum(axis=0)
    edge = None
    if w_trans is not None:
        edge = np.broadcast_to(w_trans, (max(n - 1, 0), L, L))
    return Lattice(node, edge)


def objective_and_gradient(weights: np.ndarray, instances: list[Instance],
                           alphabet: FeatureAlphabet, C: float):
    """Regularized negative log-likelihood and its gradient.

    Straightforward sentence-at-a-time evaluation; the trainer uses the
    batched equivalent, which must produce the same values.
    """
    L = alphabet.n_labels
    w_node, w_trans = _unpack(weights, alphabet)
    value = 0.0
    grad = np.zeros_like(weights)
    g_node = grad[:alphabet.n_features * L].reshape(alphabet.n_features, L)
    g_trans = (grad[alphabet.trans_base():].reshape(L, L)
               if alphabet.transitions else None)
    for inst in instances:
        lat = instance_lattice(inst, w_node, w_trans)
        log_z, marginals, edge_marginals = forward_backward(lat)
        value += log_z - sequence_score(lat, inst.gold)
        for t, fids in enumerate(inst.feats):
            if not fids:
                continue
            g_node[fids] += marginals[t]
            g_node[fids, inst.gold[t]] -= 1.0
        if g_trans is not None and len(inst.gold) > 1:
            g_trans += edge_marginals.sum(axis=0)
            for t in range(1, len(inst.gold)):
                g_trans[inst.gold[t - 1], inst.gold[t]] -= 1.0
    value += float(np.dot(weights, weights)) / (2.0 * C)
    grad += weights / C
    if not np.isfinite(value) or not np.all(np.isfinite(grad)):
        raise NumericError("non-finite objective evaluation")
    return value, grad


# --- objective: batched path (used by train) -------------------------------

class BatchedObjective:
    """Vectorized objective over all sentences at once.

    Sentences are sorted by length (descending) so that at time step t
    the active sentences are a prefix; positions live in one flat array
    addressed by precomputed per-step index vectors.  Empirical counts
    do not depend on the weights and are folded into one constant
    vector, so f(w) = sum logZ_s - w . emp + ||w||^2/(2C).
    """

    def __init__(self, instances: list[Instance], alphabet: FeatureAlphabet,
                 C: float):
        self.alphabet = alphabet
        self.C = C
        self.L = alphabet.n_labels
        order = sorted(range(len(instances)),
                       key=lambda i: -len(instances[i].gold))
        insts = [instances[i] for i in order]
        self.lengths = np.array([len(i.gold) for i in insts], dtype=np.intp)
        self.n_sent = len(insts)
        self.max_len = int(self.lengths[0]) if self.n_sent else 0
        starts = np.zeros(self.n_sent, dtype=np.intp)
        np.cumsum(self.lengths[:-1], out=starts[1:])
        total = int(self.lengths.sum())
        self.total_positions = total

        # per-rule feature ids can vary in count (unseen never happens in
        # training, but keep ragged storage for generality)
        flat_fids = []
        fid_ptr = np.zeros(total + 1, dtype=np.intp)
        gold = np.zeros(total, dtype=np.intp)
        p = 0
        for inst in insts:
            for t in range(len(inst.gold)):
                flat_fids.extend(inst.feats[t])
                gold[p] = inst.gold[t]
                p += 1
                fid_ptr[p] = len(flat_fids)
        self.fids = np.array(flat_fids, dtype=np.intp)
        self.fid_ptr = fid_ptr
        self.gold = gold
        # how many fids each position has, expanded to per-fid position ids
        counts = np.diff(fid_ptr)
        self.pos_of_fid = np.repeat(np.arange(total, dtype=np.intp), counts)
        # segment sums need every segment non-empty
        self.uniform_fids = total > 0 and bool(np.all(counts > 0))

        # per-step active prefix size and flat position indices
        self.active = np.searchsorted(-self.lengths, -(np.arange(self.max_len) + 1),
                                      side="right")
        self.step_idx = [starts[:k] + t
                         for t, k in enumerate(self.active)]
        self.last_idx = starts + self.lengths - 1
        self.sent_of_pos = np.repeat(np.arange(self.n_sent, dtype=np.intp),
                                     self.lengths)

        # constant empirical-count vector
        emp = np.zeros(alphabet.dim)
        e_node = emp[:alphabet.n_features * self.L].reshape(-1, self.L)
        np.add.at(e_node, (self.fids, gold[self.pos_of_fid]), 1.0)
        if alphabet.transitions:
            e_trans = emp[alphabet.trans_base():].reshape(self.L, self.L)
            for t in range(1, self.max_len):
                idx = self.step_idx[t]
                prev = self.step_idx[t - 1][:len(idx)]
                np.add.at(e_trans, (gold[prev], gold[idx]), 1.0)
        self.empirical = emp

    def __call__(self, weights: np.ndarray):
        a = self.alphabet
        L = self.L
        w_node, w_trans = _unpack(weights, a)
        # node scores for every position
        if self.uniform_fids:
            node = np.add.reduceat(w_node[self.fids], self.fid_ptr[:-1], axis=0)
        else:
            node = np.zeros((self.total_positions, L))
            np.add.at(node, self.pos_of_fid, w_node[self.fids])
        alpha = np.zeros_like(node)
        beta = np.zeros_like(node)

        idx0 = self.step_idx[0] if self.max_len else np.zeros(0, dtype=np.intp)
        alpha[idx0] = node[idx0]
        for t in range(1, self.max_len):
            idx = self.step_idx[t]
            prev = alpha[self.step_idx[t - 1][:len(idx)]]
            if w_trans is None:
                alpha[idx] = node[idx] + _logsumexp(prev, axis=1)[:, None]
            else:
                alpha[idx] = node[idx] + _logsumexp(
                    prev[:, :, None] + w_trans[None], axis=1)
        beta[self.last_idx] = 0.0
        for t in range(self.max_len - 2, -1, -1):
            k_next = self.active[t + 1]
            idx = self.step_idx[t][:k_next]
            nxt = self.step_idx[t + 1]
            nb = node[nxt] + beta[nxt]
            if w_trans is None:
                beta[idx] = _logsumexp(nb, axis=1)[:, None]
            else:
                beta[idx] = _logsumexp(w_trans[None] + nb[:, None, :], axis=2)

        log_z = _logsumexp(alpha[self.last_idx], axis=1)
        marg = np.exp(alpha + beta - log_z[self.sent_of_pos][:, None])

        grad = np.zeros_like(weights)
        g_node = grad[:a.n_features * L].reshape(-1, L)
        contrib = marg[self.pos_of_fid]
        for y in range(L):
            g_node[:, y] = np.bincount(self.fids, weights=contrib[:, y],
                                       minlength=a.n_features)
        if w_trans is not None:
            g_trans = grad[a.trans_base():].reshape(L, L)
            for t in range(1, self.max_len):
                idx = self.step_idx[t]
                prev = self.step_idx[t - 1][:len(idx)]
                em = np.exp(alpha[prev][:, :, None] + w_trans[None]
                            + (node[idx] + beta[idx])[:, None, :]
                            - log_z[self.sent_of_pos[idx]][:, None, None])
                g_trans += em.sum(axis=0)

        value = float(log_z.sum()) - float(np.dot(weights, self.empirical))
        value += float(np.dot(weights, weights)) / (2.0 * self.C)
        grad -= self.empirical
        grad += weights / self.C
        if not np.isfinite(value) or not np.all(np.isfinite(grad)):
            raise NumericError("non-finite objective evaluation")
        return value, grad


# --- model ----------------------------------------------------------------

@dataclass
class CrfModel:
    alphabet: FeatureAlphabet
    weights: np.ndarray
    scheme: Scheme
    template: FeatureTemplate
    event_type: str
    log: optim.IterationLog | None = field(default=None, repr=False)

    def tag_sentence(self, sentence) -> list[str]:
        if not sentence.tokens:
            return []
        w_node, w_trans = _unpack(self.weights, self.alphabet)
        fids = _sentence_fids(sentence, self.template, self.alphabet,
                              allow_unseen=True)
        lat = instance_lattice(Instance(fids, [0] * len(fids)), w_node, w_trans)
        path = viterbi(lat)
        return [self.alphabet.labels[y] for y in path]

    def tag(self, doc: Document) -> list[list[str]]:
        return [self.tag_sentence(s) for s in doc.sentences]


def train(docs: list[Document], template: FeatureTemplate, scheme: Scheme,
          event_type: str, config: TrainerConfig = TrainerConfig()) -> CrfModel:
    """Fit a per-event-type model by regularized maximum likelihood."""
    alphabet = build_alphabet(docs, template, scheme)
    instances = make_instances(docs, template, alphabet, scheme, event_type)
    if not instances:
        raise ConfigError("no non-empty sentences to train on")
    objective = BatchedObjective(instances, alphabet, config.C)
    weights, log = optim.minimize(
        objective, np.zeros(alphabet.dim),
        memory=config.lbfgs_memory, eta=config.eta,
        max_iterations=config.max_iterations)
    return CrfModel(alphabet, weights, scheme, template, event_type, log)


# --- model file I/O ---------------------------------------------------------

def save_model(model: CrfModel) -> str:
    """Versioned text serialization with exact (round-trip) weights."""
    a = model.alphabet
    template_text = model.template.text
    if not template_text.endswith("\n"):
        template_text += "\n"
    template_lines = template_text.count("\n")
    lines = [
        MODEL_FORMAT,
        f"scheme = {model.scheme.name}",
        f"event_type = {model.event_type}",
        f"transitions = {'true' if a.transitions else 'false'}",
        f"labels = {' '.join(a.labels)}",
        f"template_lines = {template_lines}",
    ]
    lines.extend(template_text.splitlines())
    lines.append(f"features = {a.n_features}")
    strings = a.feature_strings()
    for fid, feat in enumerate(strings):
        for y, lab in enumerate(a.labels):
            idx = a.index(fid, y)
            lines.append(f"{idx}\t{feat}\t{lab}\t{float(model.weights[idx])!r}")
    if a.transitions:
        for p, prev in enumerate(a.labels):
            for c, cur in enumerate(a.labels):
                idx = a.trans_index(p, c)
                lines.append(
                    f"{idx}\t{_TRANS_MARK}\t{prev},{cur}\t{float(model.weights[idx])!r}")
    return "\n".join(lines) + "\n"


def load_model(text: str) -> CrfModel:
    lines = text.splitlines()
    if not lines or lines[0] != MODEL_FORMAT:
        got = lines[0] if lines else "<empty>"
        raise ParseError(f"unsupported model format {got!r}", 1)

    def header(line_no, key):
        raw = lines[line_no - 1]
        prefix = f"{key} = "
        if not raw.startswith(prefix):
            raise ParseError(f"expected {key!r} header", line_no)
        return raw[len(prefix):]

    scheme = get_scheme(header(2, "scheme"))
    event_type = header(3, "event_type")
    transitions = header(4, "transitions") == "true"
    labels = tuple(header(5, "labels").split())
    if labels != scheme.labels:
        raise ParseError("label list does not match scheme", 5)
    try:
        template_lines = int(header(6, "template_lines"))
    except ValueError:
        raise ParseError("template_lines must be an integer", 6) from None
    template_text = "\n".join(lines[6:6 + template_lines]) + "\n"
    template = parse_template(template_text)
    if template.transitions != transitions:
        raise ParseError("transitions flag disagrees with template", 4)
    cursor = 6 + template_lines
    try:
        n_features = int(header(cursor + 1, "features"))
    except ValueError:
        raise ParseError("features must be an integer", cursor + 1) from None

    alphabet = FeatureAlphabet(labels, transitions)
    weights = np.zeros(n_features * len(labels)
                       + (len(labels) ** 2 if transitions else 0))
    expected = weights.size
    row_no = cursor + 1
    count = 0
    for raw in lines[cursor + 1:]:
        row_no += 1
        cells = raw.split("\t")
        if len(cells) != 4:
            raise ParseError(f"expected 4 fields, got {len(cells)}", row_no)
        idx_s, feat, lab, weight_s = cells
        try:
            idx = int(idx_s)
            if feat == _TRANS_MARK:
                prev, _, cur = lab.partition(",")
                want = alphabet.trans_index(labels.index(prev),
                                            labels.index(cur))
            else:
                fid = alphabet.add(feat)
                want = alphabet.index(fid, labels.index(lab))
            weight = float(weight_s)
        except ValueError as exc:
            raise ParseError(f"bad weight row: {exc}", row_no) from None
        if idx != want:
            raise ParseError(f"index {idx} does not match layout ({want})",
                             row_no)
        weights[idx] = weight
        count += 1
    if alphabet.n_features != n_features or count != expected:
        raise ParseError(
            f"expected {expected} weight rows, got {count}", row_no)
    return CrfModel(alphabet, weights, scheme, template, event_type)
