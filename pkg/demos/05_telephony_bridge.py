"""
A call over the NDJSON bridge
=============================

Start the bridge on an ephemeral port, connect as the telephony side
would, and print every frame in both directions.
"""

import asyncio

from ivrflow.bridge import BridgeServer, SessionStartMsg, UtteranceMsg, encode
from ivrflow.config import load_config
from ivrflow.engine import Engine


async def main():
    server = await BridgeServer(Engine(load_config()), "127.0.0.1", 0).start()
    serving = asyncio.create_task(server.serve_forever())
    reader, writer = await asyncio.open_connection("127.0.0.1", server.port)

    async def send(msg, replies):
        frame = encode(msg)
        print(">>", frame.decode().rstrip())
        writer.write(frame)
        await writer.drain()
        for _ in range(replies):
            print("<<", (await reader.readline()).decode().rstrip())

    await send(SessionStartMsg("demo-1", "kk"), 2)
    await send(UtteranceMsg("demo-1", text="Сәлеметсіз бе, мен картамды жоғалттым"), 2)
    await send(UtteranceMsg("demo-1", text="иә"), 2)  # transfer, then hangup

    writer.close()
    await writer.wait_closed()
    serving.cancel()
    await server.close()


asyncio.run(main())
