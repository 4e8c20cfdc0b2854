"""Frozen 6x11 monospace glyph bitmaps for printable ASCII (0x20..0x7E).

Extracted once from a bitmap font and pinned here so scene rendering never
depends on system fonts. Each glyph is a tuple of 11 row bitmasks; bit x of
a row mask is the pixel at column x (LSB = leftmost).
"""

GLYPH_WIDTH = 6
GLYPH_HEIGHT = 11

GLYPHS = {
    ' ': (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    '!': (0, 0, 0, 6, 6, 6, 6, 0, 6, 0, 0),
    '"': (0, 0, 0, 10, 10, 10, 0, 0, 0, 0, 0),
    '#': (0, 0, 10, 10, 31, 10, 10, 31, 10, 10, 0),
    '$': (0, 4, 30, 19, 15, 30, 24, 27, 15, 4, 0),
    '%': (0, 0, 7, 21, 15, 4, 30, 21, 28, 0, 0),
    '&': (0, 0, 0, 14, 3, 6, 31, 13, 31, 0, 0),
    "'": (0, 0, 12, 4, 2, 0, 0, 0, 0, 0, 0),
    '(': (0, 0, 8, 4, 6, 6, 6, 6, 4, 8, 0),
    ')': (0, 0, 2, 4, 12, 12, 12, 12, 4, 2, 0),
    '*': (0, 0, 4, 15, 6, 9, 0, 0, 0, 0, 0),
    '+': (0, 0, 0, 4, 4, 31, 4, 4, 0, 0, 0),
    ',': (0, 0, 0, 0, 0, 0, 0, 0, 12, 4, 2),
    '-': (0, 0, 0, 0, 0, 31, 0, 0, 0, 0, 0),
    '.': (0, 0, 0, 0, 0, 0, 0, 0, 6, 0, 0),
    '/': (0, 0, 16, 16, 8, 8, 4, 4, 2, 2, 0),
    '0': (0, 0, 14, 27, 27, 27, 27, 27, 14, 0, 0),
    '1': (0, 0, 12, 15, 12, 12, 12, 12, 63, 0, 0),
    '2': (0, 0, 14, 27, 24, 12, 6, 27, 31, 0, 0),
    '3': (0, 0, 14, 27, 24, 14, 24, 27, 14, 0, 0),
    '4': (0, 0, 24, 28, 26, 27, 63, 24, 24, 0, 0),
    '5': (0, 0, 31, 3, 15, 27, 24, 25, 15, 0, 0),
    '6': (0, 0, 14, 27, 3, 15, 27, 27, 14, 0, 0),
    '7': (0, 0, 31, 27, 24, 12, 12, 6, 6, 0, 0),
    '8': (0, 0, 14, 27, 27, 14, 27, 27, 14, 0, 0),
    '9': (0, 0, 14, 27, 27, 30, 24, 27, 14, 0, 0),
    ':': (0, 0, 0, 0, 0, 6, 0, 0, 6, 0, 0),
    ';': (0, 0, 0, 0, 0, 6, 0, 0, 6, 2, 1),
    '<': (0, 0, 0, 12, 6, 3, 6, 12, 0, 0, 0),
    '=': (0, 0, 0, 0, 15, 0, 15, 0, 0, 0, 0),
    '>': (0, 0, 0, 6, 12, 24, 12, 6, 0, 0, 0),
    '?': (0, 0, 0, 14, 25, 12, 6, 0, 6, 0, 0),
    '@': (0, 0, 14, 19, 25, 21, 21, 57, 3, 14, 0),
    'A': (0, 0, 0, 15, 14, 10, 31, 27, 59, 0, 0),
    'B': (0, 0, 0, 15, 27, 15, 27, 27, 15, 0, 0),
    'C': (0, 0, 0, 30, 27, 3, 3, 27, 14, 0, 0),
    'D': (0, 0, 0, 15, 27, 27, 27, 27, 15, 0, 0),
    'E': (0, 0, 0, 31, 3, 15, 3, 27, 31, 0, 0),
    'F': (0, 0, 0, 31, 3, 15, 3, 3, 7, 0, 0),
    'G': (0, 0, 0, 14, 27, 3, 31, 27, 30, 0, 0),
    'H': (0, 0, 0, 59, 27, 31, 27, 27, 59, 0, 0),
    'I': (0, 0, 0, 15, 6, 6, 6, 6, 15, 0, 0),
    'J': (0, 0, 0, 30, 12, 12, 13, 13, 7, 0, 0),
    'K': (0, 0, 0, 27, 11, 7, 15, 27, 55, 0, 0),
    'L': (0, 0, 0, 7, 3, 3, 3, 27, 31, 0, 0),
    'M': (0, 0, 0, 17, 27, 27, 31, 21, 21, 0, 0),
    'N': (0, 0, 0, 59, 23, 23, 27, 27, 19, 0, 0),
    'O': (0, 0, 0, 14, 27, 27, 27, 27, 14, 0, 0),
    'P': (0, 0, 0, 15, 27, 27, 15, 3, 7, 0, 0),
    'Q': (0, 0, 0, 14, 27, 27, 27, 27, 14, 24, 0),
    'R': (0, 0, 0, 15, 27, 27, 15, 27, 55, 0, 0),
    'S': (0, 0, 0, 30, 19, 15, 28, 25, 15, 0, 0),
    'T': (0, 0, 0, 31, 22, 6, 6, 6, 15, 0, 0),
    'U': (0, 0, 0, 59, 27, 27, 27, 27, 14, 0, 0),
    'V': (0, 0, 0, 59, 27, 10, 14, 14, 4, 0, 0),
    'W': (0, 0, 0, 53, 21, 21, 31, 14, 10, 0, 0),
    'X': (0, 0, 0, 51, 30, 12, 12, 30, 51, 0, 0),
    'Y': (0, 0, 0, 51, 51, 30, 12, 12, 30, 0, 0),
    'Z': (0, 0, 0, 31, 27, 12, 6, 27, 31, 0, 0),
    '[': (0, 0, 14, 6, 6, 6, 6, 6, 6, 14, 0),
    '\\': (0, 0, 1, 1, 2, 2, 4, 4, 8, 8, 0),
    ']': (0, 0, 14, 12, 12, 12, 12, 12, 12, 14, 0),
    '^': (0, 0, 4, 14, 27, 0, 0, 0, 0, 0, 0),
    '_': (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 63),
    '`': (0, 0, 6, 4, 8, 0, 0, 0, 0, 0, 0),
    'a': (0, 0, 0, 0, 14, 27, 30, 27, 63, 0, 0),
    'b': (0, 0, 3, 3, 15, 27, 27, 27, 15, 0, 0),
    'c': (0, 0, 0, 0, 14, 27, 3, 27, 14, 0, 0),
    'd': (0, 0, 28, 24, 30, 27, 27, 27, 62, 0, 0),
    'e': (0, 0, 0, 0, 14, 27, 31, 3, 30, 0, 0),
    'f': (0, 0, 28, 6, 31, 6, 6, 6, 31, 0, 0),
    'g': (0, 0, 0, 0, 54, 27, 27, 27, 30, 24, 15),
    'h': (0, 0, 3, 3, 15, 27, 27, 27, 27, 0, 0),
    'i': (0, 0, 12, 0, 15, 12, 12, 12, 63, 0, 0),
    'j': (0, 0, 12, 0, 15, 12, 12, 12, 12, 12, 7),
    'k': (0, 0, 3, 3, 27, 15, 7, 15, 59, 0, 0),
    'l': (0, 0, 15, 12, 12, 12, 12, 12, 63, 0, 0),
    'm': (0, 0, 0, 0, 15, 31, 21, 21, 21, 0, 0),
    'n': (0, 0, 0, 0, 13, 27, 27, 27, 27, 0, 0),
    'o': (0, 0, 0, 0, 14, 27, 27, 27, 14, 0, 0),
    'p': (0, 0, 0, 0, 15, 27, 27, 27, 15, 3, 7),
    'q': (0, 0, 0, 0, 54, 27, 27, 27, 30, 24, 60),
    'r': (0, 0, 0, 0, 59, 46, 6, 6, 15, 0, 0),
    's': (0, 0, 0, 0, 30, 7, 30, 56, 31, 0, 0),
    't': (0, 0, 6, 6, 31, 6, 6, 54, 28, 0, 0),
    'u': (0, 0, 0, 0, 27, 27, 27, 27, 62, 0, 0),
    'v': (0, 0, 0, 0, 27, 27, 14, 14, 4, 0, 0),
    'w': (0, 0, 0, 0, 53, 21, 31, 30, 10, 0, 0),
    'x': (0, 0, 0, 0, 55, 30, 12, 30, 59, 0, 0),
    'y': (0, 0, 0, 0, 59, 27, 27, 10, 14, 6, 3),
    'z': (0, 0, 0, 0, 31, 13, 6, 27, 31, 0, 0),
    '{': (0, 0, 24, 12, 12, 6, 12, 12, 12, 24, 0),
    '|': (0, 0, 0, 4, 4, 4, 4, 4, 4, 4, 0),
    '}': (0, 0, 3, 6, 6, 12, 6, 6, 6, 3, 0),
    '~': (0, 0, 0, 0, 22, 13, 0, 0, 0, 0, 0),
}

