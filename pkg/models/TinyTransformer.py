import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from models.Predictor import Predictor
from modules.errors import ContextOverflow
from modules.tokens import Token, TokenSeq
from settings.run_config import ModelConfig


class MultiHeadAttention(nn.Module):
    def __init__(self, d_model, num_heads):
        super().__init__()
        assert d_model % num_heads == 0, "d_model must be divisible by num_heads"

        self.d_model = d_model
        self.num_heads = num_heads
        self.d_k = d_model // num_heads

        self.W_q = nn.Linear(d_model, d_model)
        self.W_k = nn.Linear(d_model, d_model)
        self.W_v = nn.Linear(d_model, d_model)
        self.W_o = nn.Linear(d_model, d_model)

    def split_heads(self, x):
        batch_size, seq_length, _ = x.size()
        return x.view(batch_size, seq_length, self.num_heads, self.d_k).transpose(1, 2)

    def combine_heads(self, x):
        batch_size, _, seq_length, _ = x.size()
        return x.transpose(1, 2).contiguous().view(batch_size, seq_length, self.d_model)

    def forward(self, x, mask):
        Q = self.split_heads(self.W_q(x))
        K = self.split_heads(self.W_k(x))
        V = self.split_heads(self.W_v(x))

        scores = torch.matmul(Q, K.transpose(-2, -1)) / math.sqrt(self.d_k)
        scores = scores.masked_fill(~mask, -1e9)
        probs = torch.softmax(scores, dim=-1)
        return self.W_o(self.combine_heads(torch.matmul(probs, V)))


class FeedForward(nn.Module):
    def __init__(self, d_model, d_ff):
        super().__init__()
        self.fc1 = nn.Linear(d_model, d_ff)
        self.fc2 = nn.Linear(d_ff, d_model)

    def forward(self, x):
        return self.fc2(F.gelu(self.fc1(x)))


class DecoderBlock(nn.Module):
    """pre-norm 디코더 블록"""

    def __init__(self, d_model, num_heads, d_ff, dropout):
        super().__init__()
        self.norm1 = nn.LayerNorm(d_model)
        self.self_attn = MultiHeadAttention(d_model, num_heads)
        self.norm2 = nn.LayerNorm(d_model)
        self.feed_forward = FeedForward(d_model, d_ff)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x, mask):
        x = x + self.dropout(self.self_attn(self.norm1(x), mask))
        return x + self.dropout(self.feed_forward(self.norm2(x)))


class TinyTransformer(nn.Module):
    """학습 가능한 positional embedding 을 쓰는 decoder-only Transformer.

    기본 설정(d_model=128, 3층, 4헤드, FFN 256, context 1024)의 파라미터 수는 540,076 개.
    """

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.embedding = nn.Embedding(config.vocab_size, config.d_model)
        self.pos_embedding = nn.Embedding(config.max_context, config.d_model)
        self.blocks = nn.ModuleList([
            DecoderBlock(config.d_model, config.n_heads, config.ffn_hidden, config.dropout)
            for _ in range(config.n_layers)
        ])
        self.norm = nn.LayerNorm(config.d_model)
        self.head = nn.Linear(config.d_model, config.vocab_size)
        if config.tie_embeddings:
            self.head.weight = self.embedding.weight
        self.dropout = nn.Dropout(config.dropout)

    @staticmethod
    def causal_mask(seq_length, device=None):
        # (1, 1, T, T), 위치 i 는 j <= i 만 본다
        return torch.tril(torch.ones(seq_length, seq_length, dtype=torch.bool, device=device))[None, None]

    def forward(self, tokens):
        """tokens: (B, T) LongTensor -> logits (B, T, vocab)"""
        seq_length = tokens.size(1)
        if seq_length > self.config.max_context:
            raise ValueError(f"Context of {seq_length} tokens exceeds max_context={self.config.max_context}")
        positions = torch.arange(seq_length, device=tokens.device)
        x = self.dropout(self.embedding(tokens) + self.pos_embedding(positions)[None])
        mask = self.causal_mask(seq_length, tokens.device)
        for block in self.blocks:
            x = block(x, mask)
        return self.head(self.norm(x))

    def next_token_distributions(self, tokens):
        return torch.softmax(self.forward(tokens), dim=-1)


def count_parameters(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())


class NeuralPredictor(Predictor):
    """TinyTransformer 의 greedy(argmax) 예측기. 추론 전용 스냅샷으로 사용한다."""

    def __init__(self, model: TinyTransformer, device="cpu"):
        self.model = model.to(device).eval()
        self.device = device
        self.max_context = model.config.max_context

    @torch.no_grad()
    def predict_all(self, context: TokenSeq) -> TokenSeq:
        if not context:
            return ()
        if len(context) > self.max_context:
            raise ContextOverflow(f"Context of {len(context)} tokens exceeds model max_context={self.max_context}")
        tokens = torch.tensor([[int(t) for t in context]], dtype=torch.long, device=self.device)
        predictions = self.model(tokens)[0].argmax(dim=-1).tolist()
        return tuple(Token(i) if i < len(Token) else Token.PAD for i in predictions)

    def next_token(self, context: TokenSeq) -> Token:
        return self.predict_all(context)[-1]
