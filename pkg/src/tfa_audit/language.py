"""Character n-gram language identification for the English-page filter.

A rank-order (out-of-place) classifier over character 1-3 grams, built at
import time from the seed paragraphs below. Deliberately small: the filter
only has to answer "is this page English", and the profiles cover the
languages institutional Australian sites realistically serve alongside
English. Ties involving English resolve to the other language.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

PROFILE_SIZE = 400
_NGRAM_SIZES = (1, 2, 3)
_MIN_TEXT_CHARS = 20

_LETTERS_RE = re.compile(r"[^\W\d_]+", re.UNICODE)

# Seed paragraphs written for this module: plain help-line prose with a high
# density of each language's function words.
_SEED_TEXTS = {
    "en": (
        "The support services are free and available to everyone. You can call the "
        "helpline at any time of the day or night. We will help you find the right "
        "people and the right place. It is important that you are safe and that your "
        "family knows where to get help. This information has been written so that it "
        "is easy to read and easy to share with the people who need it most. There are "
        "many things that can be done, and we are here for you. "
        "When something goes wrong online, talk with someone you trust. Keep a record "
        "of what happened and when it happened. You do not have to know which law "
        "applies; ask and we will check it together. Many people think they should "
        "wait, but asking early makes things easier. Whatever you choose, nothing "
        "will be shared without your agreement. "
        "Our team checks each report quickly and looks through everything you send. "
        "Friends and family often notice changes first, so bring them along if that "
        "feels right. You might want help with your phone, your accounts, or your "
        "home network. Nothing here is your fault. Strong passwords, fresh backups, "
        "and careful sharing make a real difference."
    ),
    "fr": (
        "Les services de soutien sont gratuits et ouverts à toutes les personnes. Vous "
        "pouvez appeler la ligne d'écoute à toute heure du jour et de la nuit. Nous "
        "vous aiderons à trouver les bonnes personnes et le bon endroit. Il est "
        "important que vous soyez en sécurité et que votre famille sache où trouver de "
        "l'aide. Cette information a été écrite pour être facile à lire et à partager "
        "avec les personnes qui en ont le plus besoin. Il y a beaucoup de choses que "
        "l'on peut faire, et nous sommes là pour vous. "
        "Quand quelque chose se passe mal en ligne, parlez avec une personne de "
        "confiance. Gardez une trace de ce qui s'est passé et du moment où cela s'est "
        "passé. Vous n'avez pas besoin de savoir quelle loi s'applique; demandez et "
        "nous vérifierons ensemble. Beaucoup de gens pensent qu'ils doivent attendre, "
        "mais demander tôt rend les choses plus faciles. Quoi que vous choisissiez, "
        "rien ne sera partagé sans votre accord."
    ),
    "de": (
        "Die Unterstützungsdienste sind kostenlos und stehen allen Menschen offen. Sie "
        "können die Beratungsstelle zu jeder Zeit des Tages und der Nacht anrufen. Wir "
        "helfen Ihnen, die richtigen Menschen und den richtigen Ort zu finden. Es ist "
        "wichtig, dass Sie sicher sind und dass Ihre Familie weiß, wo es Hilfe gibt. "
        "Diese Informationen wurden so geschrieben, dass sie leicht zu lesen und mit "
        "den Menschen zu teilen sind, die sie am meisten brauchen. Es gibt viele "
        "Dinge, die man tun kann, und wir sind für Sie da. "
        "Wenn online etwas schiefgeht, sprechen Sie mit einer Person, der Sie "
        "vertrauen. Halten Sie fest, was passiert ist und wann es passiert ist. Sie "
        "müssen nicht wissen, welches Gesetz gilt; fragen Sie, und wir prüfen es "
        "gemeinsam. Viele Menschen glauben, sie sollten warten, aber frühes Fragen "
        "macht vieles leichter. Was auch immer Sie wählen, nichts wird ohne Ihre "
        "Zustimmung weitergegeben."
    ),
    "es": (
        "Los servicios de apoyo son gratuitos y están abiertos a todas las personas. "
        "Puede llamar a la línea de ayuda a cualquier hora del día o de la noche. Le "
        "ayudaremos a encontrar a las personas adecuadas y el lugar adecuado. Es "
        "importante que usted esté a salvo y que su familia sepa dónde encontrar "
        "ayuda. Esta información se ha escrito para que sea fácil de leer y de "
        "compartir con las personas que más la necesitan. Hay muchas cosas que se "
        "pueden hacer, y estamos aquí para usted. "
        "Cuando algo sale mal en línea, hable con una persona de confianza. Guarde un "
        "registro de lo que pasó y de cuándo pasó. No necesita saber qué ley se "
        "aplica; pregunte y lo comprobaremos juntos. Muchas personas piensan que "
        "deben esperar, pero preguntar pronto hace las cosas más fáciles. Elija lo "
        "que elija, nada se compartirá sin su acuerdo."
    ),
    "it": (
        "I servizi di sostegno sono gratuiti e aperti a tutte le persone. Può chiamare "
        "la linea di aiuto a qualsiasi ora del giorno e della notte. La aiuteremo a "
        "trovare le persone giuste e il posto giusto. È importante che lei sia al "
        "sicuro e che la sua famiglia sappia dove trovare aiuto. Queste informazioni "
        "sono state scritte per essere facili da leggere e da condividere con le "
        "persone che ne hanno più bisogno. Ci sono molte cose che si possono fare, e "
        "noi siamo qui per lei. "
        "Quando qualcosa va storto online, parli con una persona di fiducia. Conservi "
        "una traccia di quello che è successo e di quando è successo. Non serve "
        "sapere quale legge si applica; chieda e lo verificheremo insieme. Molte "
        "persone pensano di dover aspettare, ma chiedere presto rende tutto più "
        "facile. Qualunque cosa scelga, nulla sarà condiviso senza il suo consenso."
    ),
    "pt": (
        "Os serviços de apoio são gratuitos e estão abertos a todas as pessoas. Pode "
        "ligar para a linha de ajuda a qualquer hora do dia ou da noite. Vamos ajudar "
        "você a encontrar as pessoas certas e o lugar certo. É importante que você "
        "esteja em segurança e que a sua família saiba onde encontrar ajuda. Esta "
        "informação foi escrita para ser fácil de ler e de partilhar com as pessoas "
        "que mais precisam dela. Há muitas coisas que se podem fazer, e nós estamos "
        "aqui para você. "
        "Quando algo corre mal na internet, fale com uma pessoa de confiança. Guarde "
        "um registo do que aconteceu e de quando aconteceu. Não precisa de saber qual "
        "a lei que se aplica; pergunte e vamos verificar juntos. Muitas pessoas "
        "pensam que devem esperar, mas perguntar cedo torna tudo mais fácil. Escolha "
        "o que escolher, nada será partilhado sem o seu acordo."
    ),
    "nl": (
        "De hulpdiensten zijn gratis en staan open voor alle mensen. U kunt de "
        "hulplijn op elk moment van de dag of de nacht bellen. Wij helpen u de juiste "
        "mensen en de juiste plek te vinden. Het is belangrijk dat u veilig bent en "
        "dat uw familie weet waar hulp te vinden is. Deze informatie is zo geschreven "
        "dat ze makkelijk te lezen is en makkelijk te delen met de mensen die ze het "
        "meest nodig hebben. Er zijn veel dingen die gedaan kunnen worden, en wij "
        "zijn er voor u. "
        "Wanneer er online iets misgaat, praat dan met iemand die u vertrouwt. Houd "
        "bij wat er is gebeurd en wanneer het is gebeurd. U hoeft niet te weten welke "
        "wet van toepassing is; vraag het en wij zoeken het samen uit. Veel mensen "
        "denken dat ze moeten wachten, maar vroeg vragen maakt alles makkelijker. "
        "Wat u ook kiest, niets wordt gedeeld zonder uw toestemming."
    ),
}


@dataclass(frozen=True)
class LanguageVerdict:
    kind: str  # "english" | "other"
    code: str

    @property
    def is_english(self) -> bool:
        return self.kind == "english"


def _ngrams(text: str) -> Counter:
    normalized = " " + " ".join(_LETTERS_RE.findall(text.lower())) + " "
    counts: Counter = Counter()
    for n in _NGRAM_SIZES:
        for i in range(len(normalized) - n + 1):
            gram = normalized[i : i + n]
            if not gram.isspace():
                counts[gram] += 1
    return counts


def _rank_profile(counts: Counter, size: int = PROFILE_SIZE) -> dict[str, int]:
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:size]
    return {gram: rank for rank, (gram, _) in enumerate(ordered)}


_PROFILES = {code: _rank_profile(_ngrams(text)) for code, text in sorted(_SEED_TEXTS.items())}


def _distance(text_profile: dict[str, int], lang_profile: dict[str, int]) -> int:
    out_of_place = PROFILE_SIZE
    total = 0
    for gram, rank in text_profile.items():
        total += abs(rank - lang_profile[gram]) if gram in lang_profile else out_of_place
    return total


def language_check(text: str) -> LanguageVerdict:
    """Deterministic language verdict for cleaned page text.

    Texts under 20 characters are undecidable (``other("und")``). English
    wins only when it is the strict nearest profile; any tie goes to the
    competing language.
    """
    if len(text) < _MIN_TEXT_CHARS:
        return LanguageVerdict("other", "und")
    profile = _rank_profile(_ngrams(text))
    if not profile:
        return LanguageVerdict("other", "und")
    distances = {code: _distance(profile, lang) for code, lang in _PROFILES.items()}
    best = min(distances.values())
    winners = sorted(code for code, d in distances.items() if d == best)
    if winners == ["en"]:
        return LanguageVerdict("english", "en")
    non_english = [code for code in winners if code != "en"]
    return LanguageVerdict("other", non_english[0])
