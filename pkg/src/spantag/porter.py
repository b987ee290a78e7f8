"""Porter suffix-stripping stemmer.

Classic five-step Porter algorithm in its widely circulated reference
form, which departs from the original 1980 write-up in three places:
words of length <= 2 are returned unchanged, step 2 maps -bli to -ble
(instead of -abli to -able), and step 2 gains a -logi -> -log rule.
Input is lower-cased before stemming.
"""


class _Stemmer:
    """Mutable buffer walking one word through the five steps.

    ``b`` holds the word; ``k`` is the index of its current last letter
    and is adjusted downward as suffixes are removed; ``j`` marks the
    stem end set by the most recent ``ends`` test.
    """

    def __init__(self, word: str):
        self.b = word
        self.k = len(word) - 1
        self.j = 0

    def cons(self, i: int) -> bool:
        ch = self.b[i]
        if ch in "aeiou":
            return False
        if ch == "y":
            return i == 0 or not self.cons(i - 1)
        return True

    def m(self) -> int:
        """Number of consonant-vowel alternations ("measure") in b[0..j]."""
        n = 0
        i = 0
        while i <= self.j and self.cons(i):
            i += 1
        while True:
            while True:
                if i > self.j:
                    return n
                if self.cons(i):
                    break
                i += 1
            n += 1
            while i <= self.j and self.cons(i):
                i += 1

    def vowel_in_stem(self) -> bool:
        return any(not self.cons(i) for i in range(self.j + 1))

    def double_cons(self, i: int) -> bool:
        return i > 0 and self.b[i] == self.b[i - 1] and self.cons(i)

    def cvc(self, i: int) -> bool:
        """consonant-vowel-consonant at i, last not w/x/y (short-word test)."""
        if i < 2 or not self.cons(i) or self.cons(i - 1) or not self.cons(i - 2):
            return False
        return self.b[i] not in "wxy"

    def ends(self, s: str) -> bool:
        length = len(s)
        if s[-1] != self.b[self.k] or length > self.k + 1:
            return False
        if self.b[self.k - length + 1:self.k + 1] != s:
            return False
        self.j = self.k - length
        return True

    def set_to(self, s: str) -> None:
        self.b = self.b[:self.j + 1] + s
        self.k = len(self.b) - 1

    def replace_if_m(self, s: str) -> None:
        if self.m() > 0:
            self.set_to(s)

    def step1ab(self) -> None:
        # plurals and -ed / -ing
        if self.b[self.k] == "s":
            if self.ends("sses"):
                self.k -= 2
            elif self.ends("ies"):
                self.set_to("i")
            elif self.b[self.k - 1] != "s":
                self.k -= 1
        if self.ends("eed"):
            if self.m() > 0:
                self.k -= 1
        elif (self.ends("ed") or self.ends("ing")) and self.vowel_in_stem():
            self.k = self.j
            if self.ends("at"):
                self.set_to("ate")
            elif self.ends("bl"):
                self.set_to("ble")
            elif self.ends("iz"):
                self.set_to("ize")
            elif self.double_cons(self.k):
                if self.b[self.k - 1] not in "lsz":
                    self.k -= 1
            elif self.m() == 1 and self.cvc(self.k):
                self.set_to("e")

    def step1c(self) -> None:
        # terminal y -> i when the stem has another vowel
        if self.ends("y") and self.vowel_in_stem():
            self.b = self.b[:self.k] + "i"

    _STEP2 = (
        ("ational", "ate"), ("tional", "tion"),
        ("enci", "ence"), ("anci", "ance"),
        ("izer", "ize"),
        ("bli", "ble"),               # reference-form departure
        ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous"),
        ("ization", "ize"), ("ation", "ate"), ("ator", "ate"),
        ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
        ("ousness", "ous"),
        ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
        ("logi", "log"),              # reference-form departure
    )

    def step2(self) -> None:
        # double suffixes to single ones, e.g. -ization -> -ize
        for suffix, repl in self._STEP2:
            if self.ends(suffix):
                self.replace_if_m(repl)
                return

    _STEP3 = (
        ("icate", "ic"), ("ative", ""), ("alize", "al"),
        ("iciti", "ic"), ("ical", "ic"), ("ful", ""), ("ness", ""),
    )

    def step3(self) -> None:
        for suffix, repl in self._STEP3:
            if self.ends(suffix):
                self.replace_if_m(repl)
                return

    _STEP4 = (
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant",
        "ement", "ment", "ent", "ou", "ism", "ate", "iti", "ous",
        "ive", "ize",
    )

    def step4(self) -> None:
        # strip residual suffixes when the measure is > 1
        for suffix in self._STEP4:
            if self.ends(suffix):
                break
        else:
            if self.ends("ion") and self.j >= 0 and self.b[self.j] in "st":
                pass
            else:
                return
        if self.m() > 1:
            self.k = self.j

    def step5(self) -> None:
        self.j = self.k
        if self.b[self.k] == "e":
            a = self.m()
            if a > 1 or (a == 1 and not self.cvc(self.k - 1)):
                self.k -= 1
        if self.b[self.k] == "l" and self.double_cons(self.k) and self.m() > 1:
            self.k -= 1

    def run(self) -> str:
        self.step1ab()
        self.step1c()
        self.step2()
        self.step3()
        self.step4()
        self.step5()
        return self.b[:self.k + 1]


def stem(word: str) -> str:
    """Return the Porter stem of ``word`` (lower-cased first)."""
    word = word.lower()
    if len(word) <= 2:
        return word
    return _Stemmer(word).run()
