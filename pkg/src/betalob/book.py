"""Limit order book with price-time priority matching.

Prices are integer ticks throughout; the midprice is the only half-tick
quantity and comes back as an exact .0/.5 float. Queue priority is a global
arrival counter rather than a timestamp, so replaying the same event sequence
always reproduces the same book.

One book is owned by one episode at a time: it is safe to hand between
threads but not to mutate concurrently.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Deque, Iterator, Union


class Side(Enum):
    BID = "bid"
    ASK = "ask"

    @property
    def opposite(self) -> "Side":
        return Side.ASK if self is Side.BID else Side.BID


class Owner(Enum):
    HISTORICAL = "historical"
    AGENT = "agent"


class BookError(Exception):
    """Base for order book rejections."""


class CrossingOrder(BookError):
    """Limit order would cross the opposite best price."""


class InvalidVolume(BookError):
    """Volume outside the allowed range for the operation."""


class UnknownOrder(BookError):
    """Order id does not resolve to a resting order."""


class EmptySide(BookError):
    """The requested side has no resting volume."""


@dataclass(eq=False)
class Order:
    id: int
    side: Side
    price: int
    remaining: int
    owner: Owner
    arrival_seq: int


@dataclass(frozen=True)
class Fill:
    order_id: int
    price: int
    volume: int
    aggressor_side: Side
    passive_owner: Owner
    time: float


@dataclass(frozen=True)
class ExecutionReport:
    fills: tuple[Fill, ...]
    shortfall: int

    @property
    def filled(self) -> int:
        return sum(f.volume for f in self.fills)


class OrderBook:
    """Two price-indexed half-books of FIFO order queues.

    Historical order ids come from the data feed (positive); agent orders get
    ids from an internal negative counter so the two namespaces never collide.
    """

    def __init__(self) -> None:
        self._levels: dict[Side, dict[int, Deque[Order]]] = {Side.BID: {}, Side.ASK: {}}
        self._prices: dict[Side, list[int]] = {Side.BID: [], Side.ASK: []}  # ascending
        self._totals: dict[Side, dict[int, int]] = {Side.BID: {}, Side.ASK: {}}
        self._hist_totals: dict[Side, dict[int, int]] = {Side.BID: {}, Side.ASK: {}}
        self._side_volume: dict[Side, int] = {Side.BID: 0, Side.ASK: 0}
        self._side_hist_volume: dict[Side, int] = {Side.BID: 0, Side.ASK: 0}
        self._index: dict[int, Order] = {}
        self._agent: dict[Side, dict[int, Order]] = {Side.BID: {}, Side.ASK: {}}
        self._seq = 0
        self._next_agent_id = -1

    # ------------------------------------------------------------- queries

    def __contains__(self, order_id: int) -> bool:
        return order_id in self._index

    def get_order(self, order_id: int) -> Union[Order, None]:
        return self._index.get(order_id)

    def order_count(self) -> int:
        return len(self._index)

    def total_volume(self, side: Side, historical_only: bool = False) -> int:
        return self._side_hist_volume[side] if historical_only else self._side_volume[side]

    def best_bid(self, historical_only: bool = False) -> int:
        return self._best(Side.BID, historical_only)

    def best_ask(self, historical_only: bool = False) -> int:
        return self._best(Side.ASK, historical_only)

    def _best(self, side: Side, historical_only: bool) -> int:
        prices = self._prices[side]
        if not historical_only:
            if not prices:
                raise EmptySide(f"no resting {side.value} orders")
            return prices[-1] if side is Side.BID else prices[0]
        hist = self._hist_totals[side]
        scan = reversed(prices) if side is Side.BID else iter(prices)
        for p in scan:
            if hist.get(p, 0) > 0:
                return p
        raise EmptySide(f"no resting historical {side.value} orders")

    def midprice(self, historical_only: bool = False) -> float:
        # exact: an integer plus an optional half is always representable
        return (self.best_bid(historical_only) + self.best_ask(historical_only)) / 2.0

    def depth(
        self,
        side: Side,
        max_levels: Union[int, None] = None,
        historical_only: bool = False,
    ) -> list[tuple[int, int]]:
        """(price, resting volume) per level, best price first."""
        prices = self._prices[side]
        ordered = reversed(prices) if side is Side.BID else iter(prices)
        totals = self._hist_totals[side] if historical_only else self._totals[side]
        out: list[tuple[int, int]] = []
        for p in ordered:
            vol = totals.get(p, 0)
            if vol <= 0:
                continue
            out.append((p, vol))
            if max_levels is not None and len(out) >= max_levels:
                break
        return out

    def orders_at(self, side: Side, price: int) -> tuple[Order, ...]:
        return tuple(self._levels[side].get(price, ()))

    def iter_orders(self) -> Iterator[Order]:
        """All resting orders: bids best-first then asks best-first, FIFO within levels."""
        for side in (Side.BID, Side.ASK):
            prices = self._prices[side]
            ordered = reversed(prices) if side is Side.BID else iter(prices)
            for p in ordered:
                yield from self._levels[side][p]

    def agent_orders(self, side: Side) -> list[Order]:
        """The agent's resting orders on one side, in arrival order."""
        return list(self._agent[side].values())

    def volume_ahead(self, order_id: int) -> int:
        """Resting volume queued in front of the order at its price level."""
        order = self._index.get(order_id)
        if order is None:
            raise UnknownOrder(f"order {order_id} is not resting")
        ahead = 0
        for other in self._levels[order.side][order.price]:
            if other is order:
                return ahead
            ahead += other.remaining
        raise AssertionError(f"order {order_id} indexed but missing from its level")

    # ----------------------------------------------------------- mutations

    def insert_limit(
        self,
        side: Side,
        price: int,
        volume: int,
        owner: Owner,
        order_id: Union[int, None] = None,
    ) -> int:
        """Append a limit order at the back of its price level's queue."""
        if volume < 1:
            raise InvalidVolume(f"limit volume must be >= 1, got {volume}")
        if price < 1:
            raise ValueError(f"price must be a positive tick count, got {price}")
        opp = self._prices[side.opposite]
        if opp:
            opp_best = opp[0] if side is Side.BID else opp[-1]
            crosses = price >= opp_best if side is Side.BID else price <= opp_best
            if crosses:
                raise CrossingOrder(
                    f"{side.value} at {price} crosses opposite best {opp_best}"
                )
        if order_id is None:
            order_id = self._next_agent_id if owner is Owner.AGENT else None
        if order_id is None:
            raise ValueError("historical orders must carry the feed's order id")
        if order_id in self._index:
            raise ValueError(f"order id {order_id} already resting")
        if owner is Owner.AGENT:
            self._next_agent_id = min(self._next_agent_id, order_id) - 1

        self._seq += 1
        order = Order(
            id=order_id,
            side=side,
            price=price,
            remaining=volume,
            owner=owner,
            arrival_seq=self._seq,
        )
        level = self._levels[side].get(price)
        if level is None:
            level = deque()
            self._levels[side][price] = level
            insort(self._prices[side], price)
            self._totals[side][price] = 0
        level.append(order)
        self._index[order_id] = order
        self._totals[side][price] += volume
        self._side_volume[side] += volume
        if owner is Owner.HISTORICAL:
            self._hist_totals[side][price] = self._hist_totals[side].get(price, 0) + volume
            self._side_hist_volume[side] += volume
        else:
            self._agent[side][order_id] = order
        return order_id

    def cancel_volume(self, order_id: int, volume: int) -> int:
        """Remove up to `volume` from a resting order; returns what came off."""
        if volume < 1:
            raise InvalidVolume(f"cancel volume must be >= 1, got {volume}")
        order = self._index.get(order_id)
        if order is None:
            raise UnknownOrder(f"order {order_id} is not resting")
        take = min(volume, order.remaining)
        order.remaining -= take
        self._reduce_totals(order, take)
        if order.remaining == 0:
            self._levels[order.side][order.price].remove(order)
            self._drop_order(order)
            self._prune_level(order.side, order.price)
        return take

    def execute_market(
        self,
        side: Side,
        volume: int,
        limit_price: Union[int, None] = None,
        time: float = 0.0,
        skip_owner: Union[Owner, None] = None,
    ) -> ExecutionReport:
        """Consume resting volume on the opposite side in price-time priority.

        `side` is the aggressor. With a limit_price the walk stops at that
        price and any unfilled remainder is reported as shortfall; without
        one the whole opposite side is fair game and an entirely empty (or
        entirely skipped) side raises EmptySide. skip_owner leaves that
        owner's orders untouched in place, used for agent self-trade
        prevention.
        """
        if volume < 1:
            raise InvalidVolume(f"market volume must be >= 1, got {volume}")
        passive = side.opposite
        if limit_price is None:
            consumable = (
                self._side_hist_volume[passive]
                if skip_owner is Owner.AGENT
                else self._side_volume[passive]
            )
            if skip_owner is Owner.HISTORICAL:
                consumable = self._side_volume[passive] - self._side_hist_volume[passive]
            if consumable <= 0:
                raise EmptySide(f"no executable {passive.value} volume")

        fills: list[Fill] = []
        remaining = volume
        prices = self._prices[passive]
        levels = self._levels[passive]
        while remaining > 0 and prices:
            price = prices[-1] if passive is Side.BID else prices[0]
            if limit_price is not None:
                if side is Side.BID and price > limit_price:
                    break
                if side is Side.ASK and price < limit_price:
                    break
            remaining = self._consume_level(
                passive, price, levels[price], remaining, side, time, skip_owner, fills
            )
            if not self._prune_level(passive, price):
                break  # level still holds only skipped orders
        return ExecutionReport(fills=tuple(fills), shortfall=remaining)

    # ------------------------------------------------------------ helpers

    def _consume_level(
        self,
        passive: Side,
        price: int,
        queue: Deque[Order],
        remaining: int,
        aggressor: Side,
        time: float,
        skip_owner: Union[Owner, None],
        fills: list[Fill],
    ) -> int:
        if skip_owner is None:
            while remaining > 0 and queue:
                front = queue[0]
                take = min(remaining, front.remaining)
                front.remaining -= take
                remaining -= take
                self._reduce_totals(front, take)
                fills.append(
                    Fill(front.id, price, take, aggressor, front.owner, time)
                )
                if front.remaining == 0:
                    queue.popleft()
                    self._drop_order(front)
            return remaining
        # skip path: fill around the protected owner's orders, keeping them
        # (and everyone else) in queue order
        for order in list(queue):
            if remaining == 0:
                break
            if order.owner is skip_owner:
                continue
            take = min(remaining, order.remaining)
            order.remaining -= take
            remaining -= take
            self._reduce_totals(order, take)
            fills.append(Fill(order.id, price, take, aggressor, order.owner, time))
            if order.remaining == 0:
                self._drop_order(order)
        survivors = deque(o for o in queue if o.remaining > 0)
        self._levels[passive][price] = survivors
        return remaining

    def _reduce_totals(self, order: Order, amount: int) -> None:
        side, price = order.side, order.price
        self._totals[side][price] -= amount
        self._side_volume[side] -= amount
        if order.owner is Owner.HISTORICAL:
            self._hist_totals[side][price] -= amount
            self._side_hist_volume[side] -= amount

    def _drop_order(self, order: Order) -> None:
        del self._index[order.id]
        if order.owner is Owner.AGENT:
            del self._agent[order.side][order.id]

    def _prune_level(self, side: Side, price: int) -> bool:
        """Remove the level bookkeeping if it emptied; True if it was removed."""
        if self._levels[side].get(price):
            return False
        self._levels[side].pop(price, None)
        self._totals[side].pop(price, None)
        self._hist_totals[side].pop(price, None)
        prices = self._prices[side]
        idx = bisect_left(prices, price)
        if idx < len(prices) and prices[idx] == price:
            prices.pop(idx)
        return True
